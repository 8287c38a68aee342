#include <benchmark/benchmark.h>

#include "dapip/datagen.hpp"
#include "dapip/errors.hpp"
#include "dapip/interpreter.hpp"
#include "dapip/r3nn.hpp"
#include "dapip/search.hpp"

namespace dapip {
namespace {

const std::vector<ExamplePair>& initials_pairs() {
  static const std::vector<ExamplePair> pairs{{"John S. Henry", "J. Henry"}, {"Mike Stanley", "M. Stanley"}};
  return pairs;
}

void BM_Evaluate(benchmark::State& state) {
  const Program p = parse_program(
      "(Concat (GetFirstChar (arg inp)) (ConstStr DOT_SPACE) (GetLastWord (arg inp)))");
  const Interpreter interp;
  for (auto _ : state) benchmark::DoNotOptimize(interp.evaluate(p, "Bernie John Smith"));
}
BENCHMARK(BM_Evaluate);

void BM_SampleProgram(benchmark::State& state) {
  GenConfig cfg;
  cfg.max_size = static_cast<int>(state.range(0));
  const Grammar g = cfg.grammar();
  const ProgramSampler sampler(g, cfg.max_size);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(rng));
}
BENCHMARK(BM_SampleProgram)->Arg(6)->Arg(10);

void BM_MakeInstance(benchmark::State& state) {
  GenConfig cfg;
  cfg.with_api_set(ApiSet::Reduced);
  cfg.max_size = 6;
  const Grammar g = cfg.grammar();
  const ProgramSampler sampler(g, cfg.max_size);
  Rng rng(1);
  for (auto _ : state) {
    // Programs with a failing constant subexpression are skipped by datagen too.
    try {
      benchmark::DoNotOptimize(make_instance(sampler.sample(rng), rng, cfg));
    } catch (const UnsatisfiableProgram&) {
    }
  }
}
BENCHMARK(BM_MakeInstance);

R3nnModel reduced_model() {
  GenConfig gen;
  gen.with_api_set(ApiSet::Reduced);
  R3nnConfig cfg;
  cfg.max_size = 6;
  return R3nnModel(gen.grammar(), cfg);
}

void BM_Condition(benchmark::State& state) {
  const R3nnModel model = reduced_model();
  for (auto _ : state) benchmark::DoNotOptimize(model.condition_value(initials_pairs()));
}
BENCHMARK(BM_Condition)->Unit(benchmark::kMicrosecond);

void BM_NeuralSample(benchmark::State& state) {
  const R3nnModel model = reduced_model();
  const nn::Tensor cond = model.condition_value(initials_pairs());
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(model.sample(cond, rng));
}
BENCHMARK(BM_NeuralSample)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  R3nnModel model = reduced_model();
  GenConfig gen;
  gen.with_api_set(ApiSet::Reduced);
  gen.max_size = 6;
  const std::vector<TrainingInstance> batch = generate_dataset(10, gen);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(model.train_step(batch, rng));
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_UniformSearch(benchmark::State& state) {
  const Grammar g = GenConfig{}.grammar();
  const Interpreter interp;
  SearchOptions o;
  o.samples = 1000;
  for (auto _ : state) {
    Rng rng(1);
    benchmark::DoNotOptimize(uniform_search(g, interp, initials_pairs(), o, rng));
  }
}
BENCHMARK(BM_UniformSearch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dapip

BENCHMARK_MAIN();
