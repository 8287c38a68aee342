#include "dapip/bench.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "dapip/config.hpp"
#include "dapip/errors.hpp"
#include "dapip/rng.hpp"

namespace dapip {

using nlohmann::json;

std::string format_benchmark(const Benchmark& b) {
  json j;
  j["id"] = b.id;
  json pairs = json::array();
  for (const ExamplePair& p : b.pairs) pairs.push_back({{"input", p.input}, {"output", p.output}});
  j["pairs"] = std::move(pairs);
  j["provided"] = b.provided;
  if (b.reference) j["reference"] = *b.reference;
  return j.dump();
}

Benchmark parse_benchmark(std::string_view line, const ConstantTable& constants) {
  const json j = json::parse(line);
  if (!j.is_object()) throw std::invalid_argument("benchmark must be a JSON object");
  Benchmark b;
  b.id = j.at("id").get<std::string>();
  if (b.id.empty()) throw std::invalid_argument("empty benchmark id");
  for (const json& p : j.at("pairs")) b.pairs.push_back({p.at("input").get<std::string>(), p.at("output").get<std::string>()});
  if (b.pairs.empty()) throw std::invalid_argument("benchmark '" + b.id + "' has no pairs");
  b.provided = j.value("provided", std::min<std::size_t>(2, b.pairs.size()));
  if (b.provided == 0 || b.provided > b.pairs.size()) {
    throw std::invalid_argument("benchmark '" + b.id + "': provided must be 1.." + std::to_string(b.pairs.size()));
  }
  if (j.contains("reference") && !j["reference"].is_null()) {
    b.reference = j["reference"].get<std::string>();
    const Program p = parse_program(*b.reference, constants);
    const Interpreter interp(ApiLibrary::defaults(), constants);
    for (std::size_t i = 0; i < b.pairs.size(); ++i) {
      const ApiResult got = interp.evaluate(p, b.pairs[i].input);
      if (got != b.pairs[i].output) {
        throw std::invalid_argument("benchmark '" + b.id + "': reference gives " +
                                    (got ? "\"" + *got + "\"" : std::string("failure")) + " on pair " +
                                    std::to_string(i + 1) + ", expected \"" + b.pairs[i].output + "\"");
      }
    }
  }
  return b;
}

std::vector<Benchmark> load_benchmarks(const std::filesystem::path& path, const ConstantTable& constants,
                                       std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read benchmarks " + path.string());
  std::vector<Benchmark> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_benchmark(line, constants));
    } catch (const json::exception& e) {
      throw DataFormatError(path.string(), n, e.what());
    } catch (const std::invalid_argument& e) {
      throw DataFormatError(path.string(), n, e.what());
    } catch (const Error& e) {
      throw DataFormatError(path.string(), n, e.what());
    }
  }
  if (out.empty() && warnings) warnings->push_back("no benchmarks in " + path.string());
  return out;
}

void write_benchmarks(std::span<const Benchmark> suite, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const Benchmark& b : suite) out << format_benchmark(b) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::filesystem::path suite_path(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::exists(direct)) return direct;
  return default_data_dir() / "benchmarks" / (name_or_path + ".jsonl");
}

std::vector<Benchmark> load_suite(const std::string& name_or_path, std::vector<std::string>* warnings) {
  const auto path = suite_path(name_or_path);
  if (!std::filesystem::exists(path)) throw IoError("no benchmark suite '" + name_or_path + "'");
  return load_benchmarks(path, ConstantTable::defaults(), warnings);
}

std::vector<Benchmark> benchmarks_from_instances(std::span<const TrainingInstance> data, std::size_t provided,
                                                 const std::string& prefix, const ConstantTable& constants) {
  std::vector<Benchmark> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    Benchmark b;
    b.id = prefix + std::to_string(i);
    b.pairs = data[i].pairs;
    b.provided = std::min(provided, b.pairs.size());
    b.reference = print_program(data[i].program, constants);
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

using Solver = std::function<SearchResult(std::span<const ExamplePair>, const SearchOptions&, Rng&)>;

RunReport run(std::span<const Benchmark> suite, const RunSpec& spec, const ConstantTable& constants,
              const Interpreter& interp, const Solver& solve) {
  RunReport rep;
  rep.suite = spec.suite;
  rep.method = std::string(to_string(spec.method));
  rep.seed = spec.seed;
  rep.max_size = spec.max_size;
  rep.greedy = spec.greedy;
  rep.provided = spec.provided;
  rep.timing = spec.timing;
  rep.total = suite.size();
  if (suite.empty()) rep.warnings.push_back("empty benchmark suite; solve rate defined as 0");

  std::vector<const Benchmark*> order;
  for (const Benchmark& b : suite) order.push_back(&b);
  std::sort(order.begin(), order.end(), [](const Benchmark* a, const Benchmark* b) { return a->id < b->id; });

  for (std::size_t k : spec.ks) {
    BudgetResult br;
    br.k = k;
    SearchOptions opts;
    opts.samples = k;
    opts.max_size = spec.max_size;
    opts.max_steps = spec.max_steps;
    opts.greedy = spec.greedy;
    for (const Benchmark* b : order) {
      const std::size_t shown = std::min(spec.provided.value_or(b->provided), b->pairs.size());
      const std::span<const ExamplePair> given(b->pairs.data(), shown);
      Rng rng = Rng::stream(spec.seed, fnv1a(b->id));
      const SearchResult res = solve(given, opts, rng);
      BenchOutcome o;
      o.id = b->id;
      o.found = res.found();
      o.draws = res.stats.draws;
      o.solved_at = res.stats.solved_at;
      o.seconds = res.stats.seconds;
      if (res.found()) {
        o.program = print_program(*res.program, constants);
        o.solved = interp.consistent(*res.program, b->pairs);
      }
      br.solved += o.solved ? 1 : 0;
      br.outcomes.push_back(std::move(o));
    }
    rep.budgets.push_back(std::move(br));
  }
  return rep;
}

}  // namespace

RunReport run_suite(std::span<const Benchmark> suite, const RunSpec& spec, const Grammar& grammar) {
  const Interpreter interp(ApiLibrary::defaults(), grammar.constants());
  return run(suite, spec, grammar.constants(), interp,
             [&](std::span<const ExamplePair> ex, const SearchOptions& o, Rng& rng) {
               return uniform_search(grammar, interp, ex, o, rng);
             });
}

RunReport run_suite(std::span<const Benchmark> suite, const RunSpec& spec, const R3nnModel& model) {
  const Interpreter interp(ApiLibrary::defaults(), model.grammar().constants());
  RunSpec s = spec;
  s.method = SearchMethod::Neural;
  return run(suite, s, model.grammar().constants(), interp,
             [&](std::span<const ExamplePair> ex, const SearchOptions& o, Rng& rng) {
               return neural_search(model, interp, ex, o, rng);
             });
}

int percent(std::size_t solved, std::size_t total) {
  if (total == 0) return 0;
  return static_cast<int>((200 * solved + total) / (2 * total));
}

std::string render_text(const RunReport& r) {
  std::ostringstream os;
  os << "suite " << (r.suite.empty() ? "-" : r.suite) << ", method " << r.method << (r.greedy ? " (greedy)" : "")
     << ", seed " << r.seed << ", max size " << r.max_size << ", provided "
     << (r.provided ? std::to_string(*r.provided) : std::string("per benchmark")) << "\n";
  for (const std::string& w : r.warnings) os << "warning: " << w << "\n";
  auto cell = [](const std::string& s, std::size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); };
  os << cell("Samples", 13);
  for (const BudgetResult& b : r.budgets) os << cell(std::to_string(b.k), 7);
  os << "\n" << cell("Performance", 13);
  for (const BudgetResult& b : r.budgets) os << cell(std::to_string(percent(b.solved, r.total)) + "%", 7);
  os << "\n" << cell("Solved", 13);
  for (const BudgetResult& b : r.budgets) os << cell(std::to_string(b.solved) + "/" + std::to_string(r.total), 7);
  os << "\n";
  if (r.budgets.empty()) return os.str();
  os << "\n";
  const BudgetResult& last = r.budgets.back();
  std::size_t id_width = 13;
  for (const BenchOutcome& o : last.outcomes) id_width = std::max(id_width, o.id.size() + 2);
  for (std::size_t i = 0; i < last.outcomes.size(); ++i) {
    const BenchOutcome& o = last.outcomes[i];
    os << cell(o.id, id_width);
    for (const BudgetResult& b : r.budgets) os << cell(b.outcomes[i].solved ? "yes" : (b.outcomes[i].found ? "over" : "no"), 7);
    if (o.found) os << o.program;
    if (r.timing) os << "  (" << o.seconds << " s)";
    os << "\n";
  }
  return os.str();
}

std::string render_json(const RunReport& r) {
  json j;
  j["v"] = 1;
  j["suite"] = r.suite;
  j["method"] = r.method;
  j["greedy"] = r.greedy;
  j["seed"] = r.seed;
  j["max_size"] = r.max_size;
  j["provided"] = r.provided ? json(*r.provided) : json("per-benchmark");
  j["total"] = r.total;
  j["warnings"] = r.warnings;
  json budgets = json::array();
  for (const BudgetResult& b : r.budgets) {
    json results = json::array();
    for (const BenchOutcome& o : b.outcomes) {
      json x{{"id", o.id}, {"found", o.found}, {"solved", o.solved}, {"draws", o.draws}, {"solved_at", o.solved_at}};
      x["program"] = o.found ? json(o.program) : json(nullptr);
      if (r.timing) x["seconds"] = o.seconds;
      results.push_back(std::move(x));
    }
    budgets.push_back({{"k", b.k},
                       {"solved", b.solved},
                       {"total", r.total},
                       {"rate", b.rate()},
                       {"percent", percent(b.solved, r.total)},
                       {"results", std::move(results)}});
  }
  j["budgets"] = std::move(budgets);
  return j.dump(2);
}

}  // namespace dapip
