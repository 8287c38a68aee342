#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dapip/nn/tensor.hpp"
#include "dapip/rng.hpp"

namespace dapip::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // accumulated by Graph::backward, cleared by the optimizer
  Tensor m;     // Adam first moment
  Tensor v;     // Adam second moment
};

/// Named parameters in creation order. Addresses are stable.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  /// Creates a parameter; throws std::invalid_argument on a duplicate name.
  Parameter& add(const std::string& name, Tensor init);
  Parameter& add_uniform(const std::string& name, std::span<const std::size_t> shape, double bound, Rng& rng);
  Parameter& add_uniform(const std::string& name, std::initializer_list<std::size_t> shape, double bound,
                         Rng& rng);

  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  std::int64_t step() const { return step_; }
  void set_step(std::int64_t s) { step_ = s; }

  void zero_grad();
  double grad_norm() const;

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, std::size_t> index_;
  std::int64_t step_ = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip = 10.0;  // global gradient norm; <= 0 disables clipping
};

/// Clips gradients to global norm `clip`, applies one bias-corrected Adam
/// step, increments the step counter and clears the gradients. Returns the
/// pre-clip global norm. Throws NumericError on a non-finite gradient.
double adam_update(ParamStore& params, const AdamConfig& cfg = {});

// ---------------------------------------------------------------------------
// Checkpoints

/// Binary checkpoint (see docs/formats.md): metadata strings, then every
/// parameter with its Adam moments, then the step counter.
struct Checkpoint {
  std::map<std::string, std::string> meta;
};

void save_checkpoint(const ParamStore& params, const Checkpoint& meta, const std::filesystem::path& path);
/// Reads metadata only.
Checkpoint read_checkpoint_meta(const std::filesystem::path& path);
/// Loads into an existing store whose names and shapes must match exactly.
/// Throws ShapeMismatch on a layout difference and DataFormatError on a
/// corrupt file.
Checkpoint load_checkpoint(ParamStore& params, const std::filesystem::path& path);

}  // namespace dapip::nn
