#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dapip/api_library.hpp"
#include "dapip/dsl.hpp"
#include "dapip/interpreter.hpp"
#include "dapip/rng.hpp"

namespace dapip {

inline constexpr std::size_t kPairsPerInstance = 5;

struct TrainingInstance {
  Program program;
  std::vector<ExamplePair> pairs;  // kPairsPerInstance
  bool operator==(const TrainingInstance&) const = default;
};

/// Named API subsets used by the configurations below.
enum class ApiSet : std::uint8_t { Full, RegexOnly, Reduced, Custom };
std::string_view to_string(ApiSet set);
std::optional<ApiSet> parse_api_set(std::string_view name);

/// The 25 regex APIs of the reduced desk-scale DSL.
std::vector<ApiId> reduced_regex_apis();
std::vector<ApiId> apis_for(ApiSet set);

struct GenConfig {
  int max_size = 10;
  ApiSet api_set = ApiSet::Full;
  std::vector<ApiId> apis = list_apis();  // used as-is; set via with_api_set()
  std::uint64_t seed = 1;
  std::size_t max_input_length = 32;   // code points
  std::size_t max_output_length = 32;  // code points
  int min_noise_tokens = 0;
  int max_noise_tokens = 3;
  int attempts_per_input = 40;
  /// Resample tail instances until every grammar API occurs in some program.
  bool ensure_coverage = false;

  GenConfig& with_api_set(ApiSet set);
  /// Throws std::invalid_argument on an invalid configuration.
  void validate() const;
  Grammar grammar(const ConstantTable& constants = ConstantTable::defaults()) const;
};

/// Exactly uniform sampler over all programs of size <= max_size.
///
/// Counts substring expressions per size (F(1) = constants + input +
/// lookups, F(s) = (regex + transform) * F(s - 1)), counts Concat_q
/// compositions over those, then draws size, arity, child sizes and rules
/// top-down with weights proportional to completion counts.
class ProgramSampler {
 public:
  ProgramSampler(const Grammar& grammar, int max_size);

  Program sample(Rng& rng) const;

  /// Number of programs of exactly `size` (as a double; sizes grow fast).
  double count(int size) const;
  double total() const;
  int max_size() const { return max_size_; }

 private:
  Expr sample_substring(Rng& rng, int size) const;

  const Grammar* grammar_;
  int max_size_;
  std::vector<Expr> leaves_;      // size-1 substring expressions
  std::vector<ApiId> nested_;     // regex and transform APIs
  std::vector<double> f_;         // f_[s]: substring expressions of size s
  // comp_[q][m]: q-tuples of substrings with total size m.
  std::vector<std::vector<double>> comp_;
};

/// Program sampling with a fresh sampler (convenience).
Program sample_program(Rng& rng, const GenConfig& cfg);

/// What an input needs for every API of a program to have a chance to
/// succeed. Collected by walking the program once.
struct Prerequisites {
  int numbers = 0;
  int alphas = 0;
  int words = 0;
  int ws_tokens = 0;
  int caps_words = 0;
  int propercase_words = 0;
  std::size_t min_digit_run = 0;
  std::size_t min_length = 0;
  std::map<char, int> delimiters;       // character -> minimum occurrences
  std::set<std::string> lookup_tables;  // entries of these must appear
  std::set<std::string> transform_tables;
  bool date = false;
  bool street = false;
  bool street_number = false;
  bool apartment = false;
  bool zipcode = false;
  bool year = false;
  bool mixed_case = false;
  bool spaces = false;
  bool leading_zero = false;
};

Prerequisites collect_prerequisites(const Program& program, const ApiLibrary& library);
/// Prerequisites of a single API applied directly to the input.
Prerequisites api_prerequisites(ApiId api, const ApiLibrary& library);

/// Builds random inputs that satisfy a program's prerequisites and validates
/// each by evaluation.
///
/// Attempts alternate between two modes. The joint mode places every API's
/// prerequisites on the input. The chained mode works down each nested call
/// chain from the outermost API, building a string the outer part accepts
/// and embedding it as a segment of the next level's input, so only the
/// innermost call's prerequisites land on the input directly.
class InputGenerator {
 public:
  InputGenerator(const GenConfig& cfg, const ApiLibrary& library = ApiLibrary::defaults(),
                 const ConstantTable& constants = ConstantTable::defaults());

  /// Five inputs on which the program succeeds with outputs within the
  /// configured length. Throws UnsatisfiableProgram when any input cannot be
  /// found within the attempt budget.
  std::vector<std::string> generate(const Program& program, Rng& rng) const;

  /// One unvalidated candidate input containing every seed as a segment.
  /// A negative max_noise uses the configured noise bounds.
  std::string candidate(const Prerequisites& pre, Rng& rng,
                        std::span<const std::string> seeds = {}, int max_noise = -1) const;

  const Interpreter& interpreter() const { return interp_; }

 private:
  std::optional<std::string> chain_seed(const Expr& child, Rng& rng) const;
  std::string noise_word(Rng& rng) const;
  std::string number(Rng& rng, std::size_t min_len, bool leading_zero) const;

  GenConfig cfg_;
  const ApiLibrary* library_;
  Interpreter interp_;
  std::vector<std::string> noise_;
};

std::vector<std::string> generate_inputs(const Program& program, Rng& rng, const GenConfig& cfg);

/// Pairs each generated input with the program's output on it.
TrainingInstance make_instance(const Program& program, Rng& rng, const InputGenerator& gen);
TrainingInstance make_instance(const Program& program, Rng& rng, const GenConfig& cfg);

struct DatasetStats {
  std::size_t count = 0;
  std::size_t unsatisfiable_rejects = 0;
  std::size_t excluded_rejects = 0;
  std::size_t coverage_replacements = 0;
  std::vector<std::string> uncovered_apis;
};

/// Deterministic generation of n instances; instance i draws from
/// Rng::stream(cfg.seed, i). Programs whose printed form is in `exclude`
/// are resampled.
std::vector<TrainingInstance> generate_dataset(std::size_t n, const GenConfig& cfg,
                                               const std::set<std::string>& exclude = {},
                                               DatasetStats* stats = nullptr);

/// One record per line: program, then input/output fields, tab-separated
/// and backslash-escaped.
std::string format_record(const TrainingInstance& inst,
                          const ConstantTable& constants = ConstantTable::defaults());
TrainingInstance parse_record(std::string_view line,
                              const ConstantTable& constants = ConstantTable::defaults());

/// Writes <path> and <path>.manifest (key=value lines). Throws IoError.
DatasetStats emit_dataset(std::size_t n, const GenConfig& cfg, const std::filesystem::path& path,
                          const std::set<std::string>& exclude = {});
void write_dataset(const std::vector<TrainingInstance>& data, const std::filesystem::path& path);
/// Throws DataFormatError with the line number on malformed records.
std::vector<TrainingInstance> read_dataset(const std::filesystem::path& path,
                                           const ConstantTable& constants = ConstantTable::defaults());

std::filesystem::path manifest_path(const std::filesystem::path& dataset);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

}  // namespace dapip
