#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dapip/catalog.hpp"
#include "dapip/r3nn.hpp"

namespace dapip {

struct ServiceConfig {
  /// APIs and constants of the grammar searched by method=uniform.
  std::vector<ApiId> uniform_grammar = list_apis();
  ConstantTable uniform_constants = ConstantTable::defaults();
  /// Model for method=neural; requests for it fail with 409 when absent.
  std::shared_ptr<const R3nnModel> model;
  /// Wall-clock budget per synthesis request.
  std::chrono::milliseconds budget{10000};
  std::size_t max_samples = 100000;
  int max_size = 10;
  std::string cors_origin = "*";
};

/// Status code and JSON body.
struct Response {
  int status = 200;
  std::string body;
};

/// Catalog listing as a JSON array of {name, family, description}.
std::string apis_json(std::optional<ApiFamily> family = std::nullopt, int indent = -1);

/// Stateless handlers for POST /synthesize, POST /apply and GET /apis, plus
/// an HTTP/1.1 server routing to them. Request and response schemas are in
/// docs/service.md.
class SynthService {
 public:
  explicit SynthService(ServiceConfig cfg);
  ~SynthService();
  SynthService(const SynthService&) = delete;
  SynthService& operator=(const SynthService&) = delete;

  Response synthesize(std::string_view body) const;
  Response apply(std::string_view body) const;
  Response apis(std::string_view family_query) const;

  /// Blocks serving requests until stop(). False when binding fails.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (or -1); then call serve().
  int bind_any_port(const std::string& host);
  bool serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dapip
