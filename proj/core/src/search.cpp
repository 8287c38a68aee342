#include "dapip/search.hpp"

#include <algorithm>

namespace dapip {

std::string_view to_string(SearchMethod m) { return m == SearchMethod::Uniform ? "uniform" : "neural"; }

std::optional<SearchMethod> parse_search_method(std::string_view name) {
  if (name == "uniform") return SearchMethod::Uniform;
  if (name == "neural") return SearchMethod::Neural;
  return std::nullopt;
}

std::optional<Program> sample_uniform(const Grammar& grammar, Rng& rng, int max_steps, int max_size) {
  PartialTree t;
  std::vector<std::size_t> ok_idx;
  for (int step = 0; step < max_steps && !t.complete(); ++step) {
    const auto exps = enumerate_expansions(t, grammar);
    const auto ok = size_feasible(t, exps, grammar, max_size);
    ok_idx.clear();
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (ok[i]) ok_idx.push_back(i);
    }
    if (ok_idx.empty()) return std::nullopt;
    t = apply_expansion(t, exps[ok_idx[rng.uniform_index(ok_idx.size())]], grammar);
  }
  if (!t.complete()) return std::nullopt;
  return to_program(t, grammar);
}

namespace {

using Clock = std::chrono::steady_clock;

// Shared draw loop: `draw` yields one candidate or nullopt.
template <class Draw>
SearchResult run_search(const Interpreter& interp, std::span<const ExamplePair> examples, std::size_t count,
                        std::chrono::milliseconds budget, Draw&& draw) {
  const auto start = Clock::now();
  SearchResult res;
  for (std::size_t i = 0; i < count; ++i) {
    if (budget.count() > 0 && Clock::now() - start >= budget) {
      res.stats.timed_out = true;
      break;
    }
    ++res.stats.draws;
    std::optional<Program> p = draw();
    if (!p) {
      ++res.stats.incomplete;
      continue;
    }
    res.stats.sizes.push_back(program_size(*p));
    if (interp.consistent(*p, examples)) {
      res.stats.solved_at = res.stats.draws;
      res.program = std::move(p);
      break;
    }
  }
  res.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

}  // namespace

SearchResult uniform_search(const Grammar& grammar, const Interpreter& interp,
                            std::span<const ExamplePair> examples, const SearchOptions& options, Rng& rng) {
  return run_search(interp, examples, options.samples, options.budget,
                    [&] { return sample_uniform(grammar, rng, options.max_steps, options.max_size); });
}

SearchResult neural_search(const R3nnModel& model, const Interpreter& interp,
                           std::span<const ExamplePair> examples, const SearchOptions& options, Rng& rng) {
  const std::size_t count = options.greedy ? std::min<std::size_t>(options.samples, 1) : options.samples;
  if (count == 0) return {};
  const nn::Tensor cond = model.condition_value(examples);
  const R3nnModel::Budget limits{options.max_steps, options.max_size};
  return run_search(interp, examples, count, options.budget,
                    [&] { return model.sample(cond, rng, options.greedy, limits); });
}

}  // namespace dapip
