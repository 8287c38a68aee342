#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dapip/datagen.hpp"
#include "dapip/nn/params.hpp"
#include "dapip/r3nn.hpp"

namespace dapip {

struct TrainConfig {
  int epochs = 1;
  std::size_t batch_size = 10;
  nn::AdamConfig adam;  // lr 1e-3, clip 10
  std::uint64_t seed = 1;
  bool shuffle = true;

  void validate() const;
};

struct EpochReport {
  int epoch = 0;  // 1-based
  std::size_t steps = 0;
  double mean_loss = 0.0;  // over the epoch's batches
  double seconds = 0.0;
};

using StepCallback = std::function<void(std::size_t step, double loss)>;
using EpochCallback = std::function<void(const EpochReport&)>;

/// Mini-batch training over `data`. Each epoch visits every instance once
/// in an order drawn from (seed, epoch); the last batch may be short.
std::vector<EpochReport> train(R3nnModel& model, std::span<const TrainingInstance> data, const TrainConfig& cfg,
                               const EpochCallback& on_epoch = {}, const StepCallback& on_step = {});

/// Drops instances the model cannot learn from: programs larger than its
/// max_size or outside its grammar. Returns the number removed.
std::size_t filter_trainable(const R3nnModel& model, std::vector<TrainingInstance>& data);

}  // namespace dapip
