#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dapip/datagen.hpp"
#include "dapip/dsl.hpp"
#include "dapip/encoder.hpp"
#include "dapip/nn/graph.hpp"
#include "dapip/nn/layers.hpp"
#include "dapip/nn/params.hpp"

namespace dapip {

struct R3nnConfig {
  std::size_t M = 64;  // symbol and rule embedding width
  EncoderConfig encoder;
  int max_steps = 25;  // sampling budget in expansions
  int max_size = 10;   // sampling bound on program size
  std::uint64_t seed = 1;

  void validate() const;
};

/// Expansions that keep a tree completable within max_size: applying e
/// must leave applied_rules + frontier size <= max_size.
std::vector<bool> size_feasible(const PartialTree& tree, std::span<const Expansion> expansions,
                                const Grammar& grammar, int max_size);

/// Recursive-reverse-recursive tree model conditioned on example pairs.
///
/// Bottom-up, an unexpanded leaf is φ(symbol), a node expanded by an
/// arity-0 rule is that rule's terminal embedding, and any other node is
/// f_r of its children's concatenated representations. Top-down, the root
/// receives its bottom-up representation plus the projected example
/// encoding and each node passes g_r of its incoming vector, split in
/// blocks of M, to its children. Expansion e = (leaf, rule) scores
/// z_e = φ′(leaf)·ω(rule) under one softmax over all expansions.
class R3nnModel {
 public:
  R3nnModel(Grammar grammar, const R3nnConfig& cfg);

  const Grammar& grammar() const { return grammar_; }
  const R3nnConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const IoEncoder& encoder() const { return *encoder_; }

  /// Conditioning vector [M] from example pairs.
  nn::Var condition(nn::Graph& g, std::span<const ExamplePair> pairs) const;
  nn::Var condition_from_encoding(nn::Graph& g, nn::Var encoding) const;

  /// Bottom-up representation of every node, indexed by node id.
  std::vector<nn::Var> forward_pass(nn::Graph& g, const PartialTree& t) const;
  /// Top-down representation of every node, indexed by node id; for
  /// frontier leaves this is φ′.
  std::vector<nn::Var> reverse_pass(nn::Graph& g, const PartialTree& t, std::span<const nn::Var> up,
                                    nn::Var cond) const;
  /// Scores aligned with enumerate_expansions(t). Throws CompleteTree.
  nn::Var scores(nn::Graph& g, const PartialTree& t, nn::Var cond) const;

  /// π over enumerate_expansions(t) for a fixed conditioning vector.
  std::vector<double> expansion_distribution(const PartialTree& t, const nn::Tensor& cond) const;
  std::vector<double> expansion_distribution(const PartialTree& t, std::span<const ExamplePair> pairs) const;

  /// Conditioning vector computed without a gradient tape.
  nn::Tensor condition_value(std::span<const ExamplePair> pairs) const;

  /// Rollout loss of one instance: the sum over steps of
  /// −log Σ_{e consistent with the target} π(e), following a uniformly
  /// random consistent expansion each step. Returns the loss node.
  nn::Var rollout_loss(nn::Graph& g, const TrainingInstance& inst, Rng& rng) const;

  /// Accumulates gradients of the batch-mean rollout loss, applies one Adam
  /// step and returns the mean loss.
  double train_step(std::span<const TrainingInstance> batch, Rng& rng, const nn::AdamConfig& adam = {});
  /// Mean rollout loss without updating anything.
  double evaluate_loss(std::span<const TrainingInstance> batch, Rng& rng) const;

  /// Samples one program, or nullopt when the step budget runs out.
  /// Expansions that would exceed max_size are excluded. Greedy mode takes
  /// the most probable expansion each step (first on ties).
  std::optional<Program> sample(const nn::Tensor& cond, Rng& rng, bool greedy = false) const;

  struct Budget {
    int max_steps = 25;
    int max_size = 10;
  };
  /// As above with explicit limits in place of the configured ones.
  std::optional<Program> sample(const nn::Tensor& cond, Rng& rng, bool greedy, const Budget& limits) const;

  void save(const std::filesystem::path& path) const;
  /// Loads a checkpoint; the grammar is rebuilt from the file and checked
  /// against the stored fingerprint.
  static std::unique_ptr<R3nnModel> load(const std::filesystem::path& path);
  /// Loads a checkpoint that must match `grammar`; throws GrammarMismatch.
  static std::unique_ptr<R3nnModel> load(const std::filesystem::path& path, const Grammar& grammar);

 private:
  struct RuleNets {
    nn::Mlp f;  // Q·M -> M
    nn::Mlp g;  // M -> Q·M
    nn::Parameter* terminal = nullptr;  // arity-0 rules: [M]
  };

  Grammar grammar_;
  R3nnConfig cfg_;
  nn::ParamStore params_;
  std::unique_ptr<IoEncoder> encoder_;
  nn::Linear cond_proj_;
  nn::Parameter* phi_e_ = nullptr;  // [M]
  nn::Parameter* phi_f_ = nullptr;  // [M]
  nn::Parameter* omega_ = nullptr;  // [M, rules]: column r is ω(r)
  std::vector<RuleNets> nets_;      // by rule id
  std::vector<std::vector<std::size_t>> symbol_rules_;  // rule ids per symbol
};

}  // namespace dapip
