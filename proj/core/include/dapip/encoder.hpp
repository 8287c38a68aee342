#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dapip/interpreter.hpp"
#include "dapip/nn/graph.hpp"
#include "dapip/nn/layers.hpp"

namespace dapip {

/// Printable ASCII plus PAD (index 0) and UNK (index 1).
struct Charset {
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr char32_t kFirst = U' ';
  static constexpr char32_t kLast = U'~';
  static constexpr std::size_t kSize = 2 + (kLast - kFirst + 1);

  static std::size_t index(char32_t c) {
    return (c >= kFirst && c <= kLast) ? 2 + static_cast<std::size_t>(c - kFirst) : kUnk;
  }
};

enum class Pooling : std::uint8_t { Mean };

struct EncoderConfig {
  std::size_t T = 32;  // maximum string length
  std::size_t H = 32;  // recurrent width per direction
  std::size_t embed_dim = 16;
  Pooling pooling = Pooling::Mean;

  /// Throws std::invalid_argument unless T >= 2 and H, embed_dim >= 1.
  void validate() const;
  /// One value per (alignment, position): 2·T·(T−1).
  std::size_t encoding_dim() const { return 2 * T * (T - 1); }
};

/// T charset indices: code points mapped into the charset, right-padded
/// with PAD and cut at T. Sets *truncated when the string was longer.
std::vector<std::size_t> char_indices(std::string_view s, std::size_t T, bool* truncated = nullptr);

/// Cross-correlation of two [T, 2H] state matrices. For each offset δ in
/// −(T−1)..−1, 1..T−1 (ascending) and each position t, the value is
/// in[t]·out[t+δ] where t+δ lies inside the sequence and 0 elsewhere; the
/// 2(T−1) blocks of T values are concatenated in δ order.
nn::Var cross_correlate(nn::Var in, nn::Var out);

/// Example encoder: a character embedding shared by two independent
/// bidirectional LSTMs (one for inputs, one for outputs), cross-correlated
/// per pair and mean-pooled across pairs.
class IoEncoder {
 public:
  IoEncoder(nn::ParamStore& store, const EncoderConfig& cfg, Rng& rng);

  const EncoderConfig& config() const { return cfg_; }

  /// [T, embed_dim].
  nn::Var embed(nn::Graph& g, std::string_view s) const;
  /// [T, 2H]; row t stacks the forward and backward states at t, so entry
  /// (d, h, t) of the 2×H×T layout is row t, column d·H + h.
  nn::Var encode_string(nn::Graph& g, std::string_view s, bool is_output) const;
  /// Encoding of one pair: dimension 2·T·(T−1).
  nn::Var encode_pair(nn::Graph& g, const ExamplePair& pair) const;
  /// Pooled encoding of 1 or more pairs. Throws std::invalid_argument on none.
  nn::Var encode(nn::Graph& g, std::span<const ExamplePair> pairs) const;

  /// Strings cut at T so far (inputs are expected to fit).
  std::size_t truncations() const { return truncations_; }

 private:
  EncoderConfig cfg_;
  nn::Parameter* embedding_ = nullptr;  // [Charset::kSize, embed_dim]
  nn::BiLstm input_rnn_;
  nn::BiLstm output_rnn_;
  mutable std::size_t truncations_ = 0;
};

}  // namespace dapip
