#include "dapip/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "dapip/errors.hpp"
#include "dapip/search.hpp"

namespace dapip {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

Response reply(int status, json body) {
  body["v"] = kSchemaVersion;
  return {status, body.dump()};
}

Response error(int status, const std::string& message) { return reply(status, json{{"error", message}}); }

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json parse_body(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw BadRequest("body must be a JSON object");
  return j;
}

std::vector<std::string> string_array(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw BadRequest(std::string("'") + key + "' must be an array of strings");
  for (const json& x : j[key]) {
    if (!x.is_string()) throw BadRequest(std::string("'") + key + "' must be an array of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json predictions(const Interpreter& interp, const Program& p, const std::vector<std::string>& inputs) {
  json out = json::array();
  for (const std::string& in : inputs) {
    const ApiResult r = interp.evaluate(p, in);
    out.push_back(r ? json(*r) : json(nullptr));
  }
  return out;
}

}  // namespace

std::string apis_json(std::optional<ApiFamily> family, int indent) {
  json out = json::array();
  for (ApiId id : list_apis(family)) {
    const ApiSpec& s = api_spec(id);
    out.push_back({{"name", s.name}, {"family", std::string(to_string(s.family))}, {"description", s.description}});
  }
  return out.dump(indent);
}

struct SynthService::Impl {
  ServiceConfig cfg;
  Grammar uniform;
  httplib::Server server;

  explicit Impl(ServiceConfig c) : cfg(std::move(c)), uniform(cfg.uniform_grammar, cfg.uniform_constants) {}
};

SynthService::SynthService(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
  auto& srv = impl_->server;
  const std::string origin = impl_->cfg.cors_origin;
  auto send = [origin](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(r.body, "application/json");
  };
  srv.Post("/synthesize", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, synthesize(req.body));
  });
  srv.Post("/apply", [this, send](const httplib::Request& req, httplib::Response& res) { send(res, apply(req.body)); });
  srv.Get("/apis", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, apis(req.has_param("family") ? req.get_param_value("family") : std::string()));
  });
  srv.Options(R"(/.*)", [origin](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

SynthService::~SynthService() = default;

Response SynthService::synthesize(std::string_view body) const {
  try {
    const json j = parse_body(body);
    if (!j.contains("examples") || !j["examples"].is_array() || j["examples"].empty()) {
      throw BadRequest("'examples' must be a non-empty array");
    }
    std::vector<ExamplePair> examples;
    for (const json& e : j["examples"]) {
      if (!e.is_object() || !e.contains("input") || !e.contains("output") || !e["input"].is_string() ||
          !e["output"].is_string()) {
        throw BadRequest("each example needs string 'input' and 'output'");
      }
      examples.push_back({e["input"].get<std::string>(), e["output"].get<std::string>()});
    }
    const std::vector<std::string> apply_to = string_array(j, "apply_to");
    const std::string method_name = j.value("method", std::string("uniform"));
    const auto method = parse_search_method(method_name);
    if (!method) throw BadRequest("unknown method '" + method_name + "'");
    const json& samples = j.contains("samples") ? j["samples"] : json(100);
    if (!samples.is_number_integer() || samples.get<long long>() < 0) {
      throw BadRequest("'samples' must be a non-negative integer");
    }
    SearchOptions opts;
    opts.samples = std::min(static_cast<std::size_t>(samples.get<long long>()), impl_->cfg.max_samples);
    opts.max_size = impl_->cfg.max_size;
    opts.greedy = j.value("greedy", false);
    opts.budget = impl_->cfg.budget;
    Rng rng(j.value("seed", std::uint64_t{1}));

    SearchResult res;
    const Grammar* grammar = &impl_->uniform;
    if (*method == SearchMethod::Neural) {
      if (!impl_->cfg.model) return error(409, "no model checkpoint is loaded for method 'neural'");
      grammar = &impl_->cfg.model->grammar();
    }
    const Interpreter interp(ApiLibrary::defaults(), grammar->constants());
    res = *method == SearchMethod::Neural ? neural_search(*impl_->cfg.model, interp, examples, opts, rng)
                                          : uniform_search(*grammar, interp, examples, opts, rng);
    json out;
    out["found"] = res.found();
    out["method"] = method_name;
    out["stats"] = {{"draws", res.stats.draws},
                    {"incomplete", res.stats.incomplete},
                    {"solved_at", res.stats.solved_at},
                    {"timed_out", res.stats.timed_out},
                    {"seconds", res.stats.seconds}};
    if (res.found()) {
      out["program"] = print_program(*res.program, grammar->constants());
      out["consistent"] = interp.consistent(*res.program, examples);
      out["predictions"] = predictions(interp, *res.program, apply_to);
    } else {
      out["program"] = nullptr;
      out["consistent"] = false;
      out["predictions"] = json::array();
    }
    return reply(200, std::move(out));
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  } catch (const GrammarMismatch& e) {
    return error(409, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

Response SynthService::apply(std::string_view body) const {
  try {
    const json j = parse_body(body);
    if (!j.contains("program") || !j["program"].is_string()) throw BadRequest("'program' must be a string");
    const std::vector<std::string> inputs = string_array(j, "inputs");
    const ConstantTable& consts = impl_->cfg.uniform_constants;
    const Program p = parse_program(j["program"].get<std::string>(), consts);
    const Interpreter interp(ApiLibrary::defaults(), consts);
    json results = json::array();
    for (const std::string& in : inputs) {
      const ApiResult r = interp.evaluate(p, in);
      results.push_back({{"input", in}, {"output", r ? json(*r) : json(nullptr)}, {"ok", r.has_value()}});
    }
    return reply(200, json{{"results", std::move(results)}});
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  } catch (const Error& e) {
    // Syntax errors, unknown APIs and constants, arity errors.
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

Response SynthService::apis(std::string_view family_query) const {
  std::optional<ApiFamily> fam;
  if (!family_query.empty()) {
    fam = parse_family(family_query);
    if (!fam) return error(400, "unknown family '" + std::string(family_query) + "'");
  }
  return reply(200, json{{"apis", json::parse(apis_json(fam))}});
}

bool SynthService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int SynthService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool SynthService::serve() { return impl_->server.listen_after_bind(); }

void SynthService::stop() { impl_->server.stop(); }

}  // namespace dapip
