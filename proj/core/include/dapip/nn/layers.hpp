#pragma once

#include <string>
#include <vector>

#include "dapip/nn/graph.hpp"
#include "dapip/nn/params.hpp"
#include "dapip/rng.hpp"

namespace dapip::nn {

/// Uniform initialization bound shared by all layers.
inline constexpr double kInitBound = 0.08;

/// y = x·W + b with W shaped [in, out]. Works on a vector or on the rows of
/// a matrix.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
         double bound = kInitBound);

  Var operator()(Graph& g, Var x) const;
  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }
  Parameter& weight() const { return *w_; }
  Parameter& bias() const { return *b_; }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
  std::size_t in_ = 0;
  std::size_t out_ = 0;
};

/// Single hidden layer perceptron: out(tanh(hidden(x))).
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden, std::size_t out, Rng& rng);

  Var operator()(Graph& g, Var x) const;
  std::size_t in() const { return hidden_.in(); }
  std::size_t out() const { return out_.out(); }

 private:
  Linear hidden_;
  Linear out_;
};

/// Gated LSTM cell with gate order (input, forget, candidate, output).
/// Weights start uniform in ±kInitBound and the forget-gate bias at 1.
class Lstm {
 public:
  Lstm() = default;
  Lstm(ParamStore& store, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng);

  /// Runs over the rows of `xs` ([steps, input]) from zero state, in order
  /// or reversed. Returns hidden states indexed by position, not by step.
  std::vector<Var> run(Graph& g, Var xs, bool reverse = false) const;
  std::size_t hidden() const { return hidden_; }

 private:
  Parameter* wx_ = nullptr;  // [input, 4H]
  Parameter* wh_ = nullptr;  // [H, 4H]
  Parameter* b_ = nullptr;   // [4H]
  std::size_t hidden_ = 0;
};

/// Independent forward and backward LSTMs over the same sequence.
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParamStore& store, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng);

  /// [steps, 2H]: row t stacks the forward and backward states at t.
  Var encode(Graph& g, Var xs) const;
  std::size_t hidden() const { return fwd_.hidden(); }

 private:
  Lstm fwd_;
  Lstm bwd_;
};

}  // namespace dapip::nn
