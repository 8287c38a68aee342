#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dapip/catalog.hpp"

namespace dapip {

struct ConstId {
  std::uint16_t value = 0;
  auto operator<=>(const ConstId&) const = default;
};

/// The fixed universe of constant strings. Identifiers are the names used in
/// program text, e.g. "(ConstStr DOT)".
class ConstantTable {
 public:
  struct Entry {
    std::string ident;
    std::string literal;
  };

  ConstantTable() = default;
  explicit ConstantTable(std::vector<Entry> entries);

  /// Constants file: UTF-8, one "IDENT<TAB>literal" line per constant.
  static ConstantTable load(const std::filesystem::path& path);
  /// The bundled default universe (data/constants.tsv).
  static const ConstantTable& defaults();

  std::size_t size() const { return entries_.size(); }
  std::optional<ConstId> find(std::string_view ident) const;
  std::optional<ConstId> find_literal(std::string_view literal) const;
  const std::string& ident(ConstId id) const { return entries_.at(id.value).ident; }
  const std::string& literal(ConstId id) const { return entries_.at(id.value).literal; }
  std::span<const Entry> entries() const { return entries_; }

  bool operator==(const ConstantTable& other) const;

 private:
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Programs

struct Expr {
  enum class Kind : std::uint8_t { Concat, ConstStr, InputVar, Apply };

  Kind kind = Kind::InputVar;
  std::uint16_t id = 0;  // ConstId for ConstStr, ApiId for Apply
  std::vector<Expr> args;

  static Expr input() { return Expr{}; }
  static Expr constant(ConstId c) { return Expr{Kind::ConstStr, c.value, {}}; }
  static Expr apply(ApiId api, Expr arg);
  static Expr concat(std::vector<Expr> children);

  ApiId api() const { return ApiId{id}; }
  ConstId constant_id() const { return ConstId{id}; }

  bool operator==(const Expr&) const = default;
};

/// A complete DSL program: a Concat of 1 to 4 substring expressions.
class Program {
 public:
  static constexpr int kMaxConcatArity = 4;

  /// Validates the grammar shape (Concat root, arity 1..4, lookups applied
  /// to the input variable); throws ArityError or NotInGrammar.
  explicit Program(Expr root);

  const Expr& root() const { return root_; }
  bool operator==(const Program&) const = default;

 private:
  Expr root_;
};

/// Surface syntax: program := "(Concat" expr+ ")";
/// expr := "inp" | "(ConstStr" IDENT ")" | "(" APINAME " (arg " expr "))".
Program parse_program(std::string_view text,
                      const ConstantTable& constants = ConstantTable::defaults());
std::string print_program(const Program& program,
                          const ConstantTable& constants = ConstantTable::defaults());

/// Number of grammar rule applications in the program's derivation.
int program_size(const Program& program);

/// APIs used anywhere in the program, with repetition, in preorder.
std::vector<ApiId> apis_used(const Program& program);

// ---------------------------------------------------------------------------
// Grammar

enum class Symbol : std::uint8_t { E, F };

struct RuleId {
  std::uint16_t value = 0;
  auto operator<=>(const RuleId&) const = default;
};

struct GrammarRule {
  enum class Kind : std::uint8_t { Concat, Api, Const, Input };

  RuleId id;
  Symbol lhs = Symbol::F;
  Kind kind = Kind::Input;
  std::string name;              // stable, e.g. "Concat_2", "GetFirstWord", "Const:DOT", "Input"
  std::vector<std::string> rhs;  // display form of the right-hand side
  int arity = 0;                 // non-terminal children (all F)
  ApiId api;                     // Kind::Api
  ConstId constant;              // Kind::Const
};

/// Explicit rule set over a chosen API subset and constant universe:
/// E -> Concat_q(F..F) for q in 1..4, then F -> R_i(F), F -> T_j(F),
/// F -> L_k(v), F -> ConstStr_c, F -> v. Rule ids follow that order, each
/// family in catalog order.
class Grammar {
 public:
  Grammar(std::vector<ApiId> apis, ConstantTable constants);

  static Grammar full(const ConstantTable& constants = ConstantTable::defaults());
  static Grammar regex_only(const ConstantTable& constants = ConstantTable::defaults());

  std::span<const GrammarRule> rules() const { return rules_; }
  const GrammarRule& rule(RuleId id) const { return rules_.at(id.value); }
  /// Rules whose left-hand side is `symbol`, in id order.
  std::span<const RuleId> rules_for(Symbol symbol) const {
    return symbol == Symbol::E ? e_rules_ : f_rules_;
  }
  /// Position of a rule within rules_for(rule.lhs).
  std::size_t index_within_symbol(RuleId id) const { return within_symbol_.at(id.value); }

  RuleId concat_rule(int arity) const;
  std::optional<RuleId> api_rule(ApiId api) const;
  RuleId const_rule(ConstId c) const;
  RuleId input_rule() const { return input_rule_; }

  std::span<const ApiId> apis() const { return apis_; }
  bool contains(ApiId api) const { return api_rule(api).has_value(); }
  const ConstantTable& constants() const { return constants_; }

  /// Hash of the ordered rule names and constant literals.
  std::uint64_t fingerprint() const;

 private:
  std::vector<ApiId> apis_;
  ConstantTable constants_;
  std::vector<GrammarRule> rules_;
  std::vector<RuleId> e_rules_;
  std::vector<RuleId> f_rules_;
  std::vector<std::size_t> within_symbol_;
  std::vector<std::optional<RuleId>> api_rules_;  // indexed by ApiId
  RuleId input_rule_;
};

// ---------------------------------------------------------------------------
// Partial derivation trees

struct TreeNode {
  Symbol symbol = Symbol::E;
  std::optional<RuleId> rule;  // empty for an unexpanded leaf
  std::vector<int> children;
  int parent = -1;
  bool operator==(const TreeNode&) const = default;
};

struct Expansion {
  int leaf = 0;  // node index of a frontier leaf
  RuleId rule;
  bool operator==(const Expansion&) const = default;
};

/// Immutable-by-convention derivation tree. Node 0 is the root E. The
/// frontier lists unexpanded leaves in creation order.
class PartialTree {
 public:
  PartialTree();

  std::span<const TreeNode> nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  std::span<const int> frontier() const { return frontier_; }
  bool complete() const { return frontier_.empty(); }
  /// Rule applications so far; equals program_size once complete.
  int applied_rules() const { return applied_; }

  bool operator==(const PartialTree&) const = default;

 private:
  friend PartialTree apply_expansion(const PartialTree&, const Expansion&,
                                     const Grammar&);
  std::vector<TreeNode> nodes_;
  std::vector<int> frontier_;
  int applied_ = 0;
};

/// All (leaf, rule) pairs in frontier order x rule-id order. Throws
/// CompleteTree on an empty frontier.
std::vector<Expansion> enumerate_expansions(const PartialTree& tree,
                                            const Grammar& grammar);
std::size_t count_expansions(const PartialTree& tree, const Grammar& grammar);

/// Returns a new tree; throws InvalidExpansion if the leaf is not on the
/// frontier or the rule's lhs differs from the leaf symbol.
PartialTree apply_expansion(const PartialTree& tree, const Expansion& e,
                            const Grammar& grammar);

/// Complete tree -> program. Throws InvalidExpansion when incomplete.
Program to_program(const PartialTree& tree, const Grammar& grammar);

/// Preorder (leftmost) derivation of a program. Throws NotInGrammar if it
/// uses an API or constant the grammar lacks.
std::vector<RuleId> derivation(const Program& program, const Grammar& grammar);

/// Replays the leftmost derivation; the result is complete.
PartialTree to_tree(const Program& program, const Grammar& grammar);

}  // namespace dapip
