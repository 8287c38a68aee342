// Command-line front end: data generation, training, synthesis, benchmark
// runs, the HTTP service and the API listing.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include "dapip/bench.hpp"
#include "dapip/catalog.hpp"
#include "dapip/datagen.hpp"
#include "dapip/errors.hpp"
#include "dapip/search.hpp"
#include "dapip/service.hpp"
#include "dapip/text.hpp"
#include "dapip/train.hpp"

namespace {

using namespace dapip;

enum Exit : int { kOk = 0, kUsage = 1, kDataError = 2, kNoSolution = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ApiSet api_set_arg(const std::string& name) {
  const auto set = parse_api_set(name);
  if (!set || *set == ApiSet::Custom) throw UsageError("unknown API set '" + name + "'");
  return *set;
}

std::set<std::string> read_exclusions(const std::string& path) {
  std::set<std::string> out;
  if (path.empty()) return out;
  for (const TrainingInstance& inst : read_dataset(path)) out.insert(print_program(inst.program));
  return out;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  int max_size = 10;
  std::string api_set = "full";
  std::string out;
  std::string exclude;
  bool coverage = false;
};

int run_gen(const GenArgs& a) {
  GenConfig cfg;
  cfg.with_api_set(api_set_arg(a.api_set));
  cfg.seed = a.seed;
  cfg.max_size = a.max_size;
  cfg.ensure_coverage = a.coverage;
  cfg.validate();
  const DatasetStats st = emit_dataset(a.count, cfg, a.out, read_exclusions(a.exclude));
  fmt::print(stderr, "wrote {} instances to {} ({} unsatisfiable draws rejected)\n", st.count, a.out,
             st.unsatisfiable_rejects);
  return kOk;
}

struct TrainArgs {
  std::string data;
  std::string out;
  std::string resume;
  std::string api_set = "full";
  int epochs = 1;
  std::size_t batch = 10;
  double lr = 1e-3;
  double clip = 10.0;
  std::uint64_t seed = 1;
  std::size_t M = 64, H = 32, T = 32;
  std::size_t log_every = 100;
  int max_size = 10;
};

int run_train(const TrainArgs& a) {
  std::unique_ptr<R3nnModel> model;
  if (!a.resume.empty()) {
    model = R3nnModel::load(a.resume);
  } else {
    GenConfig gc;
    gc.with_api_set(api_set_arg(a.api_set));
    R3nnConfig rc;
    rc.M = a.M;
    rc.encoder.H = a.H;
    rc.encoder.T = a.T;
    rc.seed = a.seed;
    rc.max_size = a.max_size;
    model = std::make_unique<R3nnModel>(gc.grammar(), rc);
  }
  std::vector<TrainingInstance> data = read_dataset(a.data);
  if (const std::size_t dropped = filter_trainable(*model, data)) {
    fmt::print(stderr, "skipping {} instances outside the model's grammar or size bound\n", dropped);
  }
  TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch;
  tc.adam.lr = a.lr;
  tc.adam.clip = a.clip;
  tc.seed = a.seed + static_cast<std::uint64_t>(model->params().step());
  double window = 0.0;
  std::size_t in_window = 0;
  const auto wall_start = std::chrono::steady_clock::now();
  const std::clock_t cpu_start = std::clock();
  train(
      *model, data, tc,
      [&](const EpochReport& r) {
        fmt::print(stderr, "epoch {} mean loss {:.4f} ({} steps, {:.1f} s)\n", r.epoch, r.mean_loss, r.steps,
                   r.seconds);
        model->save(a.out);
      },
      [&](std::size_t step, double loss) {
        window += loss;
        if (++in_window == a.log_every) {
          fmt::print(stderr, "step {} loss {:.4f}\n", step, window / static_cast<double>(in_window));
          window = 0.0;
          in_window = 0;
        }
      });
  model->save(a.out);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  const double cpu = static_cast<double>(std::clock() - cpu_start) / CLOCKS_PER_SEC;
  fmt::print(stderr, "saved {} after {:.1f} s wall, {:.1f} s cpu\n", a.out, wall, cpu);
  return kOk;
}

struct SearchArgs {
  std::string method = "uniform";
  std::size_t samples = 100;
  std::string checkpoint;
  std::string api_set = "full";
  std::uint64_t seed = 1;
  int max_size = 10;
  bool greedy = false;
};

SearchMethod method_arg(const std::string& name) {
  const auto m = parse_search_method(name);
  if (!m) throw UsageError("unknown method '" + name + "'");
  return *m;
}

std::unique_ptr<R3nnModel> model_for(const SearchArgs& a) {
  if (method_arg(a.method) != SearchMethod::Neural) return nullptr;
  if (a.checkpoint.empty()) throw UsageError("the neural method needs --checkpoint");
  return R3nnModel::load(a.checkpoint);
}

struct SynthArgs {
  SearchArgs search;
  std::string examples;
  bool json = false;
};

int run_synth(const SynthArgs& a) {
  std::ifstream in(a.examples);
  if (!in) throw IoError("cannot read " + a.examples);
  std::vector<ExamplePair> examples;
  std::vector<std::string> queries;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() == 1) {
      queries.push_back(text::unescape_field(f[0]));
    } else if (f.size() == 2) {
      examples.push_back({text::unescape_field(f[0]), text::unescape_field(f[1])});
    } else {
      throw DataFormatError(a.examples, n, "expected 'input<TAB>output' or a bare input");
    }
  }
  if (examples.empty()) throw DataFormatError(a.examples, n, "no example pairs");

  const auto model = model_for(a.search);
  const Grammar grammar = model ? model->grammar() : GenConfig{}.with_api_set(api_set_arg(a.search.api_set)).grammar();
  const Interpreter interp(ApiLibrary::defaults(), grammar.constants());
  SearchOptions opts;
  opts.samples = a.search.samples;
  opts.max_size = a.search.max_size;
  opts.greedy = a.search.greedy;
  Rng rng(a.search.seed);
  const SearchResult res = model ? neural_search(*model, interp, examples, opts, rng)
                                 : uniform_search(grammar, interp, examples, opts, rng);
  if (!res.found()) {
    fmt::print(stderr, "no consistent program in {} draws\n", res.stats.draws);
    return kNoSolution;
  }
  fmt::print("{}\n", print_program(*res.program, grammar.constants()));
  for (const std::string& q : queries) {
    const ApiResult r = interp.evaluate(*res.program, q);
    fmt::print("{}\t{}\n", text::escape_field(q), r ? text::escape_field(*r) : std::string("<failure>"));
  }
  fmt::print(stderr, "found after {} draws in {:.3f} s\n", res.stats.solved_at, res.stats.seconds);
  return kOk;
}

struct BenchArgs {
  SearchArgs search;
  std::string suite = "worked-examples";
  std::vector<std::size_t> ks;
  int provided = -1;
  std::string json_out;
  bool json = false;
};

int run_bench(const BenchArgs& a) {
  const auto model = model_for(a.search);
  const std::vector<Benchmark> suite = load_suite(a.suite);
  RunSpec spec;
  spec.method = method_arg(a.search.method);
  spec.ks = a.ks.empty() ? std::vector<std::size_t>{a.search.samples} : a.ks;
  spec.seed = a.search.seed;
  spec.max_size = a.search.max_size;
  spec.greedy = a.search.greedy;
  if (a.provided > 0) spec.provided = static_cast<std::size_t>(a.provided);
  spec.suite = a.suite;
  std::optional<Grammar> grammar;
  if (!model) grammar = GenConfig{}.with_api_set(api_set_arg(a.search.api_set)).grammar();
  const RunReport rep = model ? run_suite(suite, spec, *model) : run_suite(suite, spec, *grammar);
  if (a.json) {
    fmt::print("{}\n", render_json(rep));
  } else {
    fmt::print("{}", render_text(rep));
  }
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out, std::ios::trunc);
    out << render_json(rep) << '\n';
    if (!out) throw IoError("cannot write " + a.json_out);
  }
  return kOk;
}

struct SuiteArgs {
  std::string data;
  std::string out;
  std::string prefix = "t";
  std::size_t provided = 5;
};

int run_make_suite(const SuiteArgs& a) {
  const std::vector<TrainingInstance> data = read_dataset(a.data);
  const std::vector<Benchmark> suite = benchmarks_from_instances(data, a.provided, a.prefix);
  write_benchmarks(suite, a.out);
  fmt::print(stderr, "wrote {} benchmarks to {}\n", suite.size(), a.out);
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string checkpoint;
  std::string api_set = "full";
  int budget_ms = 10000;
};

int run_serve(const ServeArgs& a) {
  ServiceConfig cfg;
  cfg.uniform_grammar = GenConfig{}.with_api_set(api_set_arg(a.api_set)).apis;
  cfg.budget = std::chrono::milliseconds(a.budget_ms);
  if (!a.checkpoint.empty()) cfg.model = std::shared_ptr<const R3nnModel>(R3nnModel::load(a.checkpoint));
  SynthService service(std::move(cfg));
  fmt::print(stderr, "listening on {}:{}\n", a.host, a.port);
  if (!service.listen(a.host, a.port)) throw IoError(fmt::format("cannot bind {}:{}", a.host, a.port));
  return kOk;
}

int run_apis(const std::string& family, bool json) {
  std::optional<ApiFamily> fam;
  if (!family.empty()) {
    fam = parse_family(family);
    if (!fam) throw UsageError("unknown family '" + family + "'");
  }
  if (json) {
    fmt::print("{}\n", apis_json(fam, 2));
    return kOk;
  }
  for (ApiId id : list_apis(fam)) {
    const ApiSpec& s = api_spec(id);
    fmt::print("{}\t{}\t{}\n", s.name, to_string(s.family), s.description);
  }
  return kOk;
}

void add_search_options(CLI::App* cmd, SearchArgs& s) {
  cmd->add_option("--method", s.method, "uniform or neural")->capture_default_str();
  cmd->add_option("--samples,-k", s.samples, "draw budget")->capture_default_str();
  cmd->add_option("--checkpoint", s.checkpoint, "model checkpoint (neural method)");
  cmd->add_option("--api-set", s.api_set, "grammar for the uniform method: full, regex-only, reduced")
      ->capture_default_str();
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  cmd->add_option("--max-size", s.max_size, "largest program drawn")->capture_default_str();
  cmd->add_flag("--greedy", s.greedy, "neural: a single most-probable draw");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dapip: string transformations from input-output examples"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen-data", "sample a training corpus");
  g->add_option("--count,-n", gen.count, "instances")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--max-size", gen.max_size)->capture_default_str();
  g->add_option("--api-set", gen.api_set, "full, regex-only or reduced")->capture_default_str();
  g->add_option("--out,-o", gen.out, "output file (a .manifest is written beside it)")->required();
  g->add_option("--exclude", gen.exclude, "dataset whose programs must not be drawn");
  g->add_flag("--coverage", gen.coverage, "ensure every API appears");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model on a corpus");
  t->add_option("--data", tr.data, "training corpus")->required();
  t->add_option("--out,-o", tr.out, "checkpoint to write")->required();
  t->add_option("--resume", tr.resume, "continue from a checkpoint");
  t->add_option("--api-set", tr.api_set)->capture_default_str();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--batch", tr.batch)->capture_default_str();
  t->add_option("--lr", tr.lr)->capture_default_str();
  t->add_option("--clip", tr.clip)->capture_default_str();
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--width", tr.M, "tree embedding width M")->capture_default_str();
  t->add_option("--hidden", tr.H, "encoder LSTM width H")->capture_default_str();
  t->add_option("--max-len", tr.T, "encoder string length T")->capture_default_str();
  t->add_option("--log-every", tr.log_every)->capture_default_str();
  t->add_option("--max-size", tr.max_size, "largest program the model samples")->capture_default_str();

  SynthArgs sy;
  auto* s = app.add_subcommand("synth", "find a program for examples");
  s->add_option("--examples", sy.examples, "TSV: input<TAB>output rows; bare inputs are predicted")->required();
  add_search_options(s, sy.search);

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "run a benchmark suite");
  b->add_option("--suite", be.suite, "bundled suite name or benchmark file")->capture_default_str();
  b->add_option("--ks", be.ks, "several budgets in one run, e.g. --ks 10 50 100");
  b->add_option("--provided", be.provided, "pairs shown to the solver (default: per benchmark)");
  b->add_option("--json-out", be.json_out, "also write the JSON report here");
  b->add_flag("--json", be.json, "print JSON instead of the table");
  add_search_options(b, be.search);

  SuiteArgs su;
  auto* m = app.add_subcommand("make-suite", "turn a generated corpus into a benchmark suite");
  m->add_option("--data", su.data, "corpus written by gen-data")->required();
  m->add_option("--out,-o", su.out, "benchmark file to write")->required();
  m->add_option("--prefix", su.prefix, "id prefix")->capture_default_str();
  m->add_option("--provided", su.provided, "pairs shown to the solver")->capture_default_str();

  ServeArgs sv;
  auto* v = app.add_subcommand("serve", "run the HTTP service");
  v->add_option("--host", sv.host)->capture_default_str();
  v->add_option("--port", sv.port)->capture_default_str();
  v->add_option("--checkpoint", sv.checkpoint, "model for method=neural");
  v->add_option("--api-set", sv.api_set, "grammar for method=uniform")->capture_default_str();
  v->add_option("--budget-ms", sv.budget_ms, "wall-clock budget per request")->capture_default_str();

  std::string family;
  bool apis_as_json = false;
  auto* l = app.add_subcommand("apis", "list the API catalog");
  l->add_option("--family", family, "regex, lookup or transform");
  l->add_flag("--json", apis_as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return run_gen(gen);
    if (*t) return run_train(tr);
    if (*s) return run_synth(sy);
    if (*b) return run_bench(be);
    if (*m) return run_make_suite(su);
    if (*v) return run_serve(sv);
    if (*l) return run_apis(family, apis_as_json);
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kDataError;
  }
  return kUsage;
}
