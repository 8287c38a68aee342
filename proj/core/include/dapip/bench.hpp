#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dapip/datagen.hpp"
#include "dapip/search.hpp"

namespace dapip {

/// A synthesis task: the solver sees the first `provided` pairs and a
/// returned program must reproduce all of them to count as solved.
struct Benchmark {
  std::string id;
  std::vector<ExamplePair> pairs;
  std::size_t provided = 2;
  std::optional<std::string> reference;  // program text, consistent with all pairs
  bool operator==(const Benchmark&) const = default;
};

/// One JSON object per line:
/// {"id": ..., "pairs": [{"input": ..., "output": ...}, ...],
///  "provided": n, "reference": "(Concat ...)"}; "provided" defaults to
/// min(2, pairs) and "reference" is optional. Blank lines are skipped.
std::string format_benchmark(const Benchmark& b);
Benchmark parse_benchmark(std::string_view line, const ConstantTable& constants = ConstantTable::defaults());

/// Throws DataFormatError naming the file and line for malformed rows and
/// for references inconsistent with their pairs. An empty file yields an
/// empty list and a warning.
std::vector<Benchmark> load_benchmarks(const std::filesystem::path& path,
                                       const ConstantTable& constants = ConstantTable::defaults(),
                                       std::vector<std::string>* warnings = nullptr);
void write_benchmarks(std::span<const Benchmark> suite, const std::filesystem::path& path);

/// A bundled suite name (data/benchmarks/<name>.jsonl) or a file path.
std::filesystem::path suite_path(const std::string& name_or_path);
std::vector<Benchmark> load_suite(const std::string& name_or_path, std::vector<std::string>* warnings = nullptr);

/// Benchmarks from generated instances: ids "<prefix><index>", reference
/// set to the generating program.
std::vector<Benchmark> benchmarks_from_instances(std::span<const TrainingInstance> data, std::size_t provided,
                                                 const std::string& prefix,
                                                 const ConstantTable& constants = ConstantTable::defaults());

struct RunSpec {
  SearchMethod method = SearchMethod::Uniform;
  std::vector<std::size_t> ks{100};
  std::uint64_t seed = 1;
  int max_size = 10;
  int max_steps = 25;
  bool greedy = false;
  std::optional<std::size_t> provided;  // overrides every benchmark's own count
  std::string suite;                    // label for the report
  bool timing = false;                  // include wall time (breaks byte-reproducibility)
};

struct BenchOutcome {
  std::string id;
  bool found = false;   // consistent with the provided pairs
  bool solved = false;  // consistent with all pairs
  std::string program;
  std::size_t draws = 0;
  std::size_t solved_at = 0;
  double seconds = 0.0;
};

struct BudgetResult {
  std::size_t k = 0;
  std::vector<BenchOutcome> outcomes;  // sorted by id
  std::size_t solved = 0;
  double rate() const { return outcomes.empty() ? 0.0 : static_cast<double>(solved) / outcomes.size(); }
};

struct RunReport {
  std::string suite;
  std::string method;
  std::uint64_t seed = 1;
  int max_size = 10;
  bool greedy = false;
  std::optional<std::size_t> provided;
  bool timing = false;
  std::size_t total = 0;
  std::vector<BudgetResult> budgets;  // in RunSpec::ks order
  std::vector<std::string> warnings;
};

/// Each benchmark draws from Rng::stream(seed, hash(id)) afresh for every
/// k, so a smaller budget sees a prefix of a larger budget's draws.
RunReport run_suite(std::span<const Benchmark> suite, const RunSpec& spec, const Grammar& grammar);
RunReport run_suite(std::span<const Benchmark> suite, const RunSpec& spec, const R3nnModel& model);

/// Integer percentage rounded half up: 17 of 100 -> 17, 1 of 8 -> 13.
int percent(std::size_t solved, std::size_t total);

std::string render_text(const RunReport& report);
std::string render_json(const RunReport& report);

}  // namespace dapip
