#include "dapip/train.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "dapip/errors.hpp"

namespace dapip {

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

std::vector<EpochReport> train(R3nnModel& model, std::span<const TrainingInstance> data, const TrainConfig& cfg,
                               const EpochCallback& on_epoch, const StepCallback& on_step) {
  cfg.validate();
  std::vector<EpochReport> reports;
  if (data.empty()) return reports;
  std::vector<std::size_t> order(data.size());
  std::vector<TrainingInstance> batch;
  std::size_t global_step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    EpochReport rep;
    rep.epoch = epoch;
    double total = 0.0;
    for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
      batch.clear();
      for (std::size_t j = i; j < std::min(order.size(), i + cfg.batch_size); ++j) batch.push_back(data[order[j]]);
      const double loss = model.train_step(batch, rng, cfg.adam);
      total += loss;
      ++rep.steps;
      ++global_step;
      if (on_step) on_step(global_step, loss);
    }
    rep.mean_loss = total / static_cast<double>(rep.steps);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_epoch) on_epoch(rep);
    reports.push_back(rep);
  }
  return reports;
}

std::size_t filter_trainable(const R3nnModel& model, std::vector<TrainingInstance>& data) {
  const std::size_t before = data.size();
  std::erase_if(data, [&](const TrainingInstance& inst) {
    if (program_size(inst.program) > model.config().max_size) return true;
    try {
      derivation(inst.program, model.grammar());
    } catch (const NotInGrammar&) {
      return true;
    }
    return false;
  });
  return before - data.size();
}

}  // namespace dapip
