#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dapip/dsl.hpp"
#include "dapip/interpreter.hpp"
#include "dapip/r3nn.hpp"
#include "dapip/rng.hpp"

namespace dapip {

enum class SearchMethod : std::uint8_t { Uniform, Neural };
std::string_view to_string(SearchMethod m);
std::optional<SearchMethod> parse_search_method(std::string_view name);

struct SearchOptions {
  std::size_t samples = 100;
  int max_size = 10;
  int max_steps = 25;
  /// Neural only: one greedy draw instead of `samples` stochastic ones.
  bool greedy = false;
  /// Stop drawing once this much wall time has passed (zero: no limit).
  std::chrono::milliseconds budget{0};
};

struct SearchStats {
  std::size_t draws = 0;       // programs attempted, incomplete ones included
  std::size_t incomplete = 0;  // draws that ran out of steps
  std::size_t solved_at = 0;   // 1-based draw index of the answer, 0 if none
  std::vector<int> sizes;      // size of each complete draw, in draw order
  bool timed_out = false;
  double seconds = 0.0;
};

struct SearchResult {
  std::optional<Program> program;
  SearchStats stats;
  bool found() const { return program.has_value(); }
};

/// One draw choosing uniformly among size-feasible expansions at every
/// step; nullopt when max_steps runs out first.
std::optional<Program> sample_uniform(const Grammar& grammar, Rng& rng, int max_steps, int max_size);

/// Draws up to options.samples programs expansion-uniformly and returns the
/// first consistent with `examples`.
SearchResult uniform_search(const Grammar& grammar, const Interpreter& interp,
                            std::span<const ExamplePair> examples, const SearchOptions& options, Rng& rng);

/// Encodes `examples` once, then draws from the model (or takes the greedy
/// program) and returns the first consistent draw. With zero samples the
/// model is not evaluated.
SearchResult neural_search(const R3nnModel& model, const Interpreter& interp,
                           std::span<const ExamplePair> examples, const SearchOptions& options, Rng& rng);

}  // namespace dapip
