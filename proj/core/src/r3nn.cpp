#include "dapip/r3nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dapip/errors.hpp"
#include "dapip/text.hpp"

namespace dapip {

namespace {

constexpr const char* kFormat = "dapip-r3nn-1";

std::size_t sym_index(Symbol s) { return s == Symbol::E ? 0 : 1; }

std::string join_apis(std::span<const ApiId> apis) {
  std::string out;
  for (ApiId a : apis) {
    if (!out.empty()) out += ',';
    out += api_spec(a).name;
  }
  return out;
}

std::string encode_constants(const ConstantTable& table) {
  std::string out;
  for (const auto& e : table.entries()) {
    out += text::escape_field(e.ident);
    out += '\t';
    out += text::escape_field(e.literal);
    out += '\n';
  }
  return out;
}

const std::string& meta_at(const nn::Checkpoint& ck, const std::string& key, const std::string& file) {
  const auto it = ck.meta.find(key);
  if (it == ck.meta.end()) throw DataFormatError(file, 0, "checkpoint lacks '" + key + "'");
  return it->second;
}

std::size_t meta_size(const nn::Checkpoint& ck, const std::string& key, const std::string& file) {
  const std::string& v = meta_at(ck, key, file);
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw DataFormatError(file, 0, "bad value for '" + key + "': " + v);
  }
}

Grammar grammar_from_meta(const nn::Checkpoint& ck, const std::string& file) {
  std::vector<ApiId> apis;
  const std::string& names = meta_at(ck, "apis", file);
  if (!names.empty()) {
    for (std::string_view n : text::split(names, ',')) apis.push_back(api_by_name(n));
  }
  std::vector<ConstantTable::Entry> entries;
  for (std::string_view line : text::split(meta_at(ck, "constants", file), '\n')) {
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 2) throw DataFormatError(file, 0, "bad constants entry");
    entries.push_back({text::unescape_field(f[0]), text::unescape_field(f[1])});
  }
  return Grammar(std::move(apis), ConstantTable(std::move(entries)));
}

R3nnConfig config_from_meta(const nn::Checkpoint& ck, const std::string& file) {
  R3nnConfig cfg;
  cfg.M = meta_size(ck, "M", file);
  cfg.encoder.T = meta_size(ck, "T", file);
  cfg.encoder.H = meta_size(ck, "H", file);
  cfg.encoder.embed_dim = meta_size(ck, "embed_dim", file);
  cfg.max_steps = static_cast<int>(meta_size(ck, "max_steps", file));
  cfg.max_size = static_cast<int>(meta_size(ck, "max_size", file));
  cfg.seed = meta_size(ck, "seed", file);
  return cfg;
}

}  // namespace

void R3nnConfig::validate() const {
  encoder.validate();
  if (M < 1) throw std::invalid_argument("R3NN width must be positive");
  if (max_steps < 1 || max_size < 2) throw std::invalid_argument("sampling budget too small");
}

std::vector<bool> size_feasible(const PartialTree& tree, std::span<const Expansion> expansions,
                                const Grammar& grammar, int max_size) {
  // Every remaining leaf needs at least one more rule.
  const int base = tree.applied_rules() + static_cast<int>(tree.frontier().size());
  std::vector<bool> ok(expansions.size());
  for (std::size_t i = 0; i < expansions.size(); ++i) {
    ok[i] = base + grammar.rule(expansions[i].rule).arity <= max_size;
  }
  return ok;
}

R3nnModel::R3nnModel(Grammar grammar, const R3nnConfig& cfg) : grammar_(std::move(grammar)), cfg_(cfg) {
  cfg_.validate();
  Rng rng = Rng::stream(cfg_.seed, 0);
  const std::size_t M = cfg_.M;
  encoder_ = std::make_unique<IoEncoder>(params_, cfg_.encoder, rng);
  cond_proj_ = nn::Linear(params_, "r3nn.cond", cfg_.encoder.encoding_dim(), M, rng);
  phi_e_ = &params_.add_uniform("r3nn.phi.E", {M}, nn::kInitBound, rng);
  phi_f_ = &params_.add_uniform("r3nn.phi.F", {M}, nn::kInitBound, rng);
  const std::size_t R = grammar_.rules().size();
  omega_ = &params_.add_uniform("r3nn.omega", {M, R}, nn::kInitBound, rng);
  nets_.resize(R);
  for (const GrammarRule& r : grammar_.rules()) {
    RuleNets& n = nets_[r.id.value];
    const std::string base = "r3nn.rule." + r.name;
    if (r.arity == 0) {
      n.terminal = &params_.add_uniform(base + ".leaf", {M}, nn::kInitBound, rng);
    } else {
      const auto Q = static_cast<std::size_t>(r.arity);
      n.f = nn::Mlp(params_, base + ".f", Q * M, 2 * M, M, rng);
      n.g = nn::Mlp(params_, base + ".g", M, 2 * M, Q * M, rng);
    }
  }
  symbol_rules_.resize(2);
  for (Symbol s : {Symbol::E, Symbol::F}) {
    for (RuleId id : grammar_.rules_for(s)) symbol_rules_[sym_index(s)].push_back(id.value);
  }
}

nn::Var R3nnModel::condition_from_encoding(nn::Graph& g, nn::Var encoding) const {
  return cond_proj_(g, encoding);
}

nn::Var R3nnModel::condition(nn::Graph& g, std::span<const ExamplePair> pairs) const {
  return condition_from_encoding(g, encoder_->encode(g, pairs));
}

nn::Tensor R3nnModel::condition_value(std::span<const ExamplePair> pairs) const {
  nn::Graph g(false);
  return condition(g, pairs).value();
}

std::vector<nn::Var> R3nnModel::forward_pass(nn::Graph& g, const PartialTree& t) const {
  const auto nodes = t.nodes();
  std::vector<nn::Var> up(nodes.size());
  // Children always have larger ids than their parent.
  for (std::size_t i = nodes.size(); i-- > 0;) {
    const TreeNode& n = nodes[i];
    if (!n.rule) {
      up[i] = g.param(n.symbol == Symbol::E ? *phi_e_ : *phi_f_);
      continue;
    }
    const RuleNets& net = nets_[n.rule->value];
    if (net.terminal) {
      up[i] = g.param(*net.terminal);
      continue;
    }
    std::vector<nn::Var> kids;
    kids.reserve(n.children.size());
    for (int c : n.children) kids.push_back(up[static_cast<std::size_t>(c)]);
    up[i] = net.f(g, kids.size() == 1 ? kids.front() : nn::concat(kids));
  }
  return up;
}

std::vector<nn::Var> R3nnModel::reverse_pass(nn::Graph& g, const PartialTree& t, std::span<const nn::Var> up,
                                             nn::Var cond) const {
  const auto nodes = t.nodes();
  std::vector<nn::Var> down(nodes.size());
  down[0] = up[0] + cond;
  const std::size_t M = cfg_.M;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (!n.rule || n.children.empty()) continue;
    const nn::Var out = nets_[n.rule->value].g(g, down[i]);
    for (std::size_t q = 0; q < n.children.size(); ++q) {
      down[static_cast<std::size_t>(n.children[q])] = n.children.size() == 1 ? out : nn::slice(out, q * M, M);
    }
  }
  return down;
}

nn::Var R3nnModel::scores(nn::Graph& g, const PartialTree& t, nn::Var cond) const {
  if (t.complete()) throw CompleteTree();
  const auto up = forward_pass(g, t);
  const auto down = reverse_pass(g, t, up, cond);
  const auto frontier = t.frontier();
  std::vector<nn::Var> leaves;
  leaves.reserve(frontier.size());
  for (int leaf : frontier) leaves.push_back(down[static_cast<std::size_t>(leaf)]);
  const std::size_t R = grammar_.rules().size();
  // [L, M]·[M, R], then pick each leaf's own-symbol rules in id order.
  const nn::Var all = nn::matmul(nn::stack_rows(leaves), g.param(*omega_));
  const std::size_t flat_shape[] = {frontier.size() * R};
  std::vector<std::size_t> pick;
  for (std::size_t p = 0; p < frontier.size(); ++p) {
    for (std::size_t r : symbol_rules_[sym_index(t.node(frontier[p]).symbol)]) pick.push_back(p * R + r);
  }
  return nn::gather(nn::reshape(all, flat_shape), pick);
}

std::vector<double> R3nnModel::expansion_distribution(const PartialTree& t, const nn::Tensor& cond) const {
  nn::Graph g(false);
  const nn::Var z = scores(g, t, g.constant(cond));
  const auto p = nn::softmax(z).value().data();
  return {p.begin(), p.end()};
}

std::vector<double> R3nnModel::expansion_distribution(const PartialTree& t,
                                                      std::span<const ExamplePair> pairs) const {
  return expansion_distribution(t, condition_value(pairs));
}

nn::Var R3nnModel::rollout_loss(nn::Graph& g, const TrainingInstance& inst, Rng& rng) const {
  const nn::Var cond = condition(g, inst.pairs);
  const PartialTree target = to_tree(inst.program, grammar_);
  PartialTree t;
  std::vector<int> match{0};  // node of t -> node of target
  nn::Var loss;
  while (!t.complete()) {
    const nn::Var z = scores(g, t, cond);
    // One consistent expansion per frontier leaf: its rule in the target.
    std::vector<std::size_t> valid;
    std::vector<Expansion> choices;
    std::size_t offset = 0;
    for (int leaf : t.frontier()) {
      const TreeNode& tn = target.node(match[static_cast<std::size_t>(leaf)]);
      valid.push_back(offset + grammar_.index_within_symbol(*tn.rule));
      choices.push_back({leaf, *tn.rule});
      offset += symbol_rules_[sym_index(t.node(leaf).symbol)].size();
    }
    const nn::Var step = nn::logsumexp(z) - nn::logsumexp(nn::gather(z, valid));
    loss = loss.valid() ? loss + step : step;
    const Expansion e = choices[rng.uniform_index(choices.size())];
    t = apply_expansion(t, e, grammar_);
    const auto& mine = t.node(e.leaf).children;
    const auto& theirs = target.node(match[static_cast<std::size_t>(e.leaf)]).children;
    match.resize(t.nodes().size(), -1);
    for (std::size_t q = 0; q < mine.size(); ++q) match[static_cast<std::size_t>(mine[q])] = theirs[q];
  }
  return loss;
}

double R3nnModel::train_step(std::span<const TrainingInstance> batch, Rng& rng, const nn::AdamConfig& adam) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  double total = 0.0;
  params_.zero_grad();
  for (const TrainingInstance& inst : batch) {
    nn::Graph g;
    const nn::Var l = rollout_loss(g, inst, rng);
    total += l.value().item();
    g.backward(nn::scale(l, 1.0 / static_cast<double>(batch.size())));
  }
  const double mean = total / static_cast<double>(batch.size());
  if (!std::isfinite(mean)) throw NumericError("non-finite training loss");
  adam_update(params_, adam);
  return mean;
}

double R3nnModel::evaluate_loss(std::span<const TrainingInstance> batch, Rng& rng) const {
  if (batch.empty()) throw std::invalid_argument("empty evaluation batch");
  double total = 0.0;
  for (const TrainingInstance& inst : batch) {
    nn::Graph g(false);
    total += rollout_loss(g, inst, rng).value().item();
  }
  return total / static_cast<double>(batch.size());
}

std::optional<Program> R3nnModel::sample(const nn::Tensor& cond, Rng& rng, bool greedy) const {
  return sample(cond, rng, greedy, Budget{cfg_.max_steps, cfg_.max_size});
}

std::optional<Program> R3nnModel::sample(const nn::Tensor& cond, Rng& rng, bool greedy, const Budget& limits) const {
  PartialTree t;
  for (int step = 0; step < limits.max_steps && !t.complete(); ++step) {
    const auto exps = enumerate_expansions(t, grammar_);
    std::vector<double> p = expansion_distribution(t, cond);
    const auto ok = size_feasible(t, exps, grammar_, limits.max_size);
    double mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!ok[i]) p[i] = 0.0;
      mass += p[i];
    }
    if (!(mass > 0.0)) return std::nullopt;
    const std::size_t pick =
        greedy ? static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()) : rng.weighted_index(p);
    t = apply_expansion(t, exps[pick], grammar_);
  }
  if (!t.complete()) return std::nullopt;
  return to_program(t, grammar_);
}

void R3nnModel::save(const std::filesystem::path& path) const {
  nn::Checkpoint ck;
  ck.meta["format"] = kFormat;
  ck.meta["grammar_fingerprint"] = std::to_string(grammar_.fingerprint());
  ck.meta["apis"] = join_apis(grammar_.apis());
  ck.meta["constants"] = encode_constants(grammar_.constants());
  ck.meta["M"] = std::to_string(cfg_.M);
  ck.meta["T"] = std::to_string(cfg_.encoder.T);
  ck.meta["H"] = std::to_string(cfg_.encoder.H);
  ck.meta["embed_dim"] = std::to_string(cfg_.encoder.embed_dim);
  ck.meta["max_steps"] = std::to_string(cfg_.max_steps);
  ck.meta["max_size"] = std::to_string(cfg_.max_size);
  ck.meta["seed"] = std::to_string(cfg_.seed);
  nn::save_checkpoint(params_, ck, path);
}

std::unique_ptr<R3nnModel> R3nnModel::load(const std::filesystem::path& path) {
  const std::string file = path.string();
  const nn::Checkpoint ck = nn::read_checkpoint_meta(path);
  if (meta_at(ck, "format", file) != kFormat) throw DataFormatError(file, 0, "not an R3NN checkpoint");
  Grammar grammar = grammar_from_meta(ck, file);
  if (std::to_string(grammar.fingerprint()) != meta_at(ck, "grammar_fingerprint", file)) {
    throw GrammarMismatch("checkpoint grammar does not match its fingerprint");
  }
  auto model = std::make_unique<R3nnModel>(std::move(grammar), config_from_meta(ck, file));
  nn::load_checkpoint(model->params_, path);
  return model;
}

std::unique_ptr<R3nnModel> R3nnModel::load(const std::filesystem::path& path, const Grammar& grammar) {
  const std::string file = path.string();
  const nn::Checkpoint ck = nn::read_checkpoint_meta(path);
  if (meta_at(ck, "format", file) != kFormat) throw DataFormatError(file, 0, "not an R3NN checkpoint");
  if (meta_at(ck, "grammar_fingerprint", file) != std::to_string(grammar.fingerprint())) {
    throw GrammarMismatch("checkpoint was trained on a different grammar");
  }
  auto model = std::make_unique<R3nnModel>(grammar, config_from_meta(ck, file));
  nn::load_checkpoint(model->params_, path);
  return model;
}

}  // namespace dapip
