#include "dapip/dsl.hpp"

#include <algorithm>
#include <fstream>

#include "dapip/config.hpp"
#include "dapip/errors.hpp"
#include "dapip/rng.hpp"
#include "dapip/text.hpp"

namespace dapip {

// ---------------------------------------------------------------------------
// ConstantTable

ConstantTable::ConstantTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].ident.empty()) {
      throw DataFormatError("<constants>", i + 1, "empty constant identifier");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[j].ident == entries_[i].ident) {
        throw DataFormatError("<constants>", i + 1,
                              "duplicate constant '" + entries_[i].ident + "'");
      }
    }
  }
}

ConstantTable ConstantTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open constants file " + path.string());
  std::vector<Entry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataFormatError(path.string(), lineno, "expected IDENT<TAB>literal");
    }
    const std::string ident = line.substr(0, tab);
    if (std::any_of(ident.begin(), ident.end(), [](char c) {
          return text::is_space(static_cast<unsigned char>(c)) || c == '(' || c == ')';
        })) {
      throw DataFormatError(path.string(), lineno, "invalid constant identifier");
    }
    for (const Entry& e : entries) {
      if (e.ident == ident) {
        throw DataFormatError(path.string(), lineno, "duplicate constant '" + ident + "'");
      }
    }
    entries.push_back({ident, text::unescape_field(line.substr(tab + 1))});
  }
  return ConstantTable(std::move(entries));
}

const ConstantTable& ConstantTable::defaults() {
  static const ConstantTable table = load(default_data_dir() / "constants.tsv");
  return table;
}

std::optional<ConstId> ConstantTable::find(std::string_view ident) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].ident == ident) return ConstId{static_cast<std::uint16_t>(i)};
  }
  return std::nullopt;
}

std::optional<ConstId> ConstantTable::find_literal(std::string_view literal) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].literal == literal) return ConstId{static_cast<std::uint16_t>(i)};
  }
  return std::nullopt;
}

bool ConstantTable::operator==(const ConstantTable& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].ident != other.entries_[i].ident ||
        entries_[i].literal != other.entries_[i].literal) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Expr / Program

Expr Expr::apply(ApiId api, Expr arg) {
  Expr e{Kind::Apply, api.value, {}};
  e.args.push_back(std::move(arg));
  return e;
}

Expr Expr::concat(std::vector<Expr> children) {
  return Expr{Kind::Concat, 0, std::move(children)};
}

namespace {

void validate_substring(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Concat:
      throw ArityError("Concat may only appear at the program root");
    case Expr::Kind::ConstStr:
    case Expr::Kind::InputVar:
      if (!e.args.empty()) throw ArityError("leaf expression with arguments");
      return;
    case Expr::Kind::Apply: {
      if (e.args.size() != 1) throw ArityError("API call needs exactly one argument");
      const ApiSpec& spec = api_spec(e.api());
      if (spec.family == ApiFamily::Lookup && e.args[0].kind != Expr::Kind::InputVar) {
        throw NotInGrammar("lookup API " + spec.name + " must be applied to the input");
      }
      validate_substring(e.args[0]);
      return;
    }
  }
}

}  // namespace

Program::Program(Expr root) : root_(std::move(root)) {
  if (root_.kind != Expr::Kind::Concat) {
    throw ArityError("program root must be Concat");
  }
  if (root_.args.empty() || root_.args.size() > kMaxConcatArity) {
    throw ArityError("Concat takes 1 to 4 arguments, got " +
                     std::to_string(root_.args.size()));
  }
  for (const Expr& child : root_.args) validate_substring(child);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ConstantTable& constants)
      : text_(text), constants_(constants) {}

  Program parse() {
    expect('(');
    const std::size_t head_pos = skip_ws();
    const std::string head = atom();
    if (head != "Concat") throw SyntaxError("expected 'Concat'", head_pos);
    std::vector<Expr> children;
    while (peek() != ')') {
      if (at_end()) throw SyntaxError("unterminated Concat", pos_);
      children.push_back(expr());
    }
    expect(')');
    if (skip_ws() != text_.size()) throw SyntaxError("trailing input", pos_);
    if (children.empty() || children.size() > Program::kMaxConcatArity) {
      throw ArityError("Concat takes 1 to 4 arguments, got " +
                       std::to_string(children.size()));
    }
    return Program(Expr::concat(std::move(children)));
  }

 private:
  bool at_end() { return skip_ws() >= text_.size(); }

  std::size_t skip_ws() {
    while (pos_ < text_.size() && text::is_space(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) {
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  std::string atom() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !text::is_space(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) throw SyntaxError("expected identifier", start);
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr expr() {
    if (peek() != '(') {
      const std::size_t at = pos_;
      const std::string a = atom();
      if (a == "inp" || a == "Inp") return Expr::input();
      throw SyntaxError("expected 'inp' or '(' but found '" + a + "'", at);
    }
    ++pos_;
    const std::size_t head_pos = skip_ws();
    const std::string head = atom();
    if (head == "ConstStr") {
      const std::size_t ident_pos = skip_ws();
      const std::string ident = atom();
      const auto id = constants_.find(ident);
      if (!id) throw UnknownConstant(ident);
      (void)ident_pos;
      expect(')');
      return Expr::constant(*id);
    }
    if (head == "Concat") throw ArityError("nested Concat is not in the grammar");
    if (head == "arg") throw SyntaxError("'arg' without an API", head_pos);
    const auto api = find_api(head);
    if (!api) throw UnknownApi(head);
    expect('(');
    const std::size_t arg_pos = skip_ws();
    if (atom() != "arg") throw SyntaxError("expected 'arg'", arg_pos);
    Expr inner = expr();
    expect(')');
    expect(')');
    return Expr::apply(*api, std::move(inner));
  }

  std::string_view text_;
  const ConstantTable& constants_;
  std::size_t pos_ = 0;
};

void print_expr(const Expr& e, const ConstantTable& constants, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::InputVar:
      out += "inp";
      return;
    case Expr::Kind::ConstStr:
      out += "(ConstStr ";
      out += constants.ident(e.constant_id());
      out += ')';
      return;
    case Expr::Kind::Apply:
      out += '(';
      out += api_spec(e.api()).name;
      out += " (arg ";
      print_expr(e.args[0], constants, out);
      out += "))";
      return;
    case Expr::Kind::Concat:
      out += "(Concat";
      for (const Expr& c : e.args) {
        out += ' ';
        print_expr(c, constants, out);
      }
      out += ')';
      return;
  }
}

int substring_size(const Expr& e) {
  if (e.kind != Expr::Kind::Apply) return 1;
  if (api_spec(e.api()).family == ApiFamily::Lookup) return 1;
  return 1 + substring_size(e.args[0]);
}

void collect_apis(const Expr& e, std::vector<ApiId>& out) {
  if (e.kind == Expr::Kind::Apply) out.push_back(e.api());
  for (const Expr& c : e.args) collect_apis(c, out);
}

}  // namespace

Program parse_program(std::string_view text, const ConstantTable& constants) {
  return Parser(text, constants).parse();
}

std::string print_program(const Program& program, const ConstantTable& constants) {
  std::string out;
  print_expr(program.root(), constants, out);
  return out;
}

int program_size(const Program& program) {
  int n = 1;
  for (const Expr& c : program.root().args) n += substring_size(c);
  return n;
}

std::vector<ApiId> apis_used(const Program& program) {
  std::vector<ApiId> out;
  collect_apis(program.root(), out);
  return out;
}

// ---------------------------------------------------------------------------
// Grammar

Grammar::Grammar(std::vector<ApiId> apis, ConstantTable constants)
    : constants_(std::move(constants)) {
  std::sort(apis.begin(), apis.end());
  apis.erase(std::unique(apis.begin(), apis.end()), apis.end());
  auto family_rank = [](ApiFamily f) {
    switch (f) {
      case ApiFamily::Regex: return 0;
      case ApiFamily::Transform: return 1;
      case ApiFamily::Lookup: return 2;
    }
    return 3;
  };
  std::stable_sort(apis.begin(), apis.end(), [&](ApiId a, ApiId b) {
    return family_rank(api_spec(a).family) < family_rank(api_spec(b).family);
  });
  apis_ = apis;
  api_rules_.assign(api_catalog().size(), std::nullopt);

  auto push = [&](GrammarRule r) {
    r.id = RuleId{static_cast<std::uint16_t>(rules_.size())};
    auto& bucket = r.lhs == Symbol::E ? e_rules_ : f_rules_;
    within_symbol_.push_back(bucket.size());
    bucket.push_back(r.id);
    rules_.push_back(std::move(r));
    return rules_.back().id;
  };

  for (int q = 1; q <= Program::kMaxConcatArity; ++q) {
    GrammarRule r;
    r.lhs = Symbol::E;
    r.kind = GrammarRule::Kind::Concat;
    r.name = "Concat_" + std::to_string(q);
    r.arity = q;
    r.rhs.push_back("Concat");
    for (int i = 0; i < q; ++i) r.rhs.push_back("F");
    push(std::move(r));
  }
  for (ApiId api : apis_) {
    const ApiSpec& spec = api_spec(api);
    GrammarRule r;
    r.lhs = Symbol::F;
    r.kind = GrammarRule::Kind::Api;
    r.name = spec.name;
    r.api = api;
    r.rhs.push_back(spec.name);
    if (spec.family == ApiFamily::Lookup) {
      r.rhs.push_back("v");
      r.arity = 0;
    } else {
      r.rhs.push_back("F");
      r.arity = 1;
    }
    api_rules_[api.value] = push(std::move(r));
  }
  for (std::size_t c = 0; c < constants_.size(); ++c) {
    GrammarRule r;
    r.lhs = Symbol::F;
    r.kind = GrammarRule::Kind::Const;
    r.constant = ConstId{static_cast<std::uint16_t>(c)};
    r.name = "Const:" + constants_.ident(r.constant);
    r.rhs = {"ConstStr", constants_.ident(r.constant)};
    push(std::move(r));
  }
  GrammarRule v;
  v.lhs = Symbol::F;
  v.kind = GrammarRule::Kind::Input;
  v.name = "Input";
  v.rhs = {"v"};
  input_rule_ = push(std::move(v));
}

Grammar Grammar::full(const ConstantTable& constants) {
  return Grammar(list_apis(), constants);
}

Grammar Grammar::regex_only(const ConstantTable& constants) {
  return Grammar(list_apis(ApiFamily::Regex), constants);
}

RuleId Grammar::concat_rule(int arity) const {
  if (arity < 1 || arity > Program::kMaxConcatArity) {
    throw ArityError("Concat arity " + std::to_string(arity));
  }
  return e_rules_[static_cast<std::size_t>(arity - 1)];
}

std::optional<RuleId> Grammar::api_rule(ApiId api) const {
  if (api.value >= api_rules_.size()) return std::nullopt;
  return api_rules_[api.value];
}

RuleId Grammar::const_rule(ConstId c) const {
  if (c.value >= constants_.size()) {
    throw NotInGrammar("constant id " + std::to_string(c.value));
  }
  return RuleId{static_cast<std::uint16_t>(e_rules_.size() + apis_.size() + c.value)};
}

std::uint64_t Grammar::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const GrammarRule& r : rules_) {
    h = fnv1a(r.name, h);
    h = fnv1a(std::string_view("\x1f", 1), h);
  }
  for (const auto& e : constants_.entries()) {
    h = fnv1a(e.literal, h);
    h = fnv1a(std::string_view("\x1e", 1), h);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Partial trees

PartialTree::PartialTree() {
  nodes_.push_back(TreeNode{Symbol::E, std::nullopt, {}, -1});
  frontier_.push_back(0);
}

std::size_t count_expansions(const PartialTree& tree, const Grammar& grammar) {
  std::size_t n = 0;
  for (int leaf : tree.frontier()) n += grammar.rules_for(tree.node(leaf).symbol).size();
  return n;
}

std::vector<Expansion> enumerate_expansions(const PartialTree& tree,
                                            const Grammar& grammar) {
  if (tree.complete()) throw CompleteTree();
  std::vector<Expansion> out;
  out.reserve(count_expansions(tree, grammar));
  for (int leaf : tree.frontier()) {
    for (RuleId r : grammar.rules_for(tree.node(leaf).symbol)) out.push_back({leaf, r});
  }
  return out;
}

PartialTree apply_expansion(const PartialTree& tree, const Expansion& e,
                            const Grammar& grammar) {
  const auto it = std::find(tree.frontier_.begin(), tree.frontier_.end(), e.leaf);
  if (it == tree.frontier_.end()) {
    throw InvalidExpansion("node " + std::to_string(e.leaf) + " is not a frontier leaf");
  }
  if (e.rule.value >= grammar.rules().size()) {
    throw InvalidExpansion("rule id " + std::to_string(e.rule.value) + " out of range");
  }
  const GrammarRule& rule = grammar.rule(e.rule);
  if (rule.lhs != tree.node(e.leaf).symbol) {
    throw InvalidExpansion("rule " + rule.name + " does not apply to this leaf");
  }
  PartialTree out = tree;
  out.frontier_.erase(out.frontier_.begin() + (it - tree.frontier_.begin()));
  auto& expanded = out.nodes_[static_cast<std::size_t>(e.leaf)];
  expanded.rule = e.rule;
  for (int i = 0; i < rule.arity; ++i) {
    const int child = static_cast<int>(out.nodes_.size());
    out.nodes_.push_back(TreeNode{Symbol::F, std::nullopt, {}, e.leaf});
    out.nodes_[static_cast<std::size_t>(e.leaf)].children.push_back(child);
    out.frontier_.push_back(child);
  }
  ++out.applied_;
  return out;
}

namespace {

Expr node_to_expr(const PartialTree& tree, int index, const Grammar& grammar) {
  const TreeNode& n = tree.node(index);
  if (!n.rule) throw InvalidExpansion("tree is incomplete");
  const GrammarRule& r = grammar.rule(*n.rule);
  switch (r.kind) {
    case GrammarRule::Kind::Concat: {
      std::vector<Expr> kids;
      for (int c : n.children) kids.push_back(node_to_expr(tree, c, grammar));
      return Expr::concat(std::move(kids));
    }
    case GrammarRule::Kind::Api:
      if (r.arity == 0) return Expr::apply(r.api, Expr::input());
      return Expr::apply(r.api, node_to_expr(tree, n.children.at(0), grammar));
    case GrammarRule::Kind::Const:
      return Expr::constant(r.constant);
    case GrammarRule::Kind::Input:
      return Expr::input();
  }
  throw InvalidExpansion("unknown rule kind");
}

RuleId substring_rule(const Expr& e, const Grammar& grammar) {
  switch (e.kind) {
    case Expr::Kind::InputVar:
      return grammar.input_rule();
    case Expr::Kind::ConstStr:
      return grammar.const_rule(e.constant_id());
    case Expr::Kind::Apply: {
      const auto r = grammar.api_rule(e.api());
      if (!r) throw NotInGrammar("API " + api_spec(e.api()).name + " is not in the grammar");
      return *r;
    }
    case Expr::Kind::Concat:
      break;
  }
  throw NotInGrammar("nested Concat");
}

void build(const Expr& e, int leaf, PartialTree& tree, const Grammar& grammar,
           std::vector<RuleId>* trace) {
  const RuleId r = e.kind == Expr::Kind::Concat
                       ? grammar.concat_rule(static_cast<int>(e.args.size()))
                       : substring_rule(e, grammar);
  tree = apply_expansion(tree, {leaf, r}, grammar);
  if (trace) trace->push_back(r);
  const auto children = tree.node(leaf).children;  // copy: tree is reassigned below
  for (std::size_t i = 0; i < children.size(); ++i) {
    build(e.args[i], children[i], tree, grammar, trace);
  }
}

}  // namespace

Program to_program(const PartialTree& tree, const Grammar& grammar) {
  if (!tree.complete()) throw InvalidExpansion("tree is incomplete");
  return Program(node_to_expr(tree, 0, grammar));
}

std::vector<RuleId> derivation(const Program& program, const Grammar& grammar) {
  std::vector<RuleId> trace;
  PartialTree tree;
  build(program.root(), 0, tree, grammar, &trace);
  return trace;
}

PartialTree to_tree(const Program& program, const Grammar& grammar) {
  PartialTree tree;
  build(program.root(), 0, tree, grammar, nullptr);
  return tree;
}

}  // namespace dapip
