#include "dapip/encoder.hpp"

#include <stdexcept>

#include "dapip/errors.hpp"
#include "dapip/text.hpp"

namespace dapip {

void EncoderConfig::validate() const {
  if (T < 2) throw std::invalid_argument("encoder T must be at least 2");
  if (H < 1 || embed_dim < 1) throw std::invalid_argument("encoder widths must be positive");
}

std::vector<std::size_t> char_indices(std::string_view s, std::size_t T, bool* truncated) {
  const std::u32string cps = text::decode_utf8(s);
  std::vector<std::size_t> idx(T, Charset::kPad);
  for (std::size_t i = 0; i < std::min(T, cps.size()); ++i) idx[i] = Charset::index(cps[i]);
  if (truncated) *truncated = cps.size() > T;
  return idx;
}

nn::Var cross_correlate(nn::Var in, nn::Var out) {
  const nn::Tensor& A = in.value();
  const nn::Tensor& B = out.value();
  if (A.rank() != 2 || !A.same_shape(B)) {
    throw ShapeMismatch("cross_correlate " + A.shape_string() + " vs " + B.shape_string());
  }
  const std::size_t T = A.rows(), W = A.cols();
  const auto T_ = static_cast<std::ptrdiff_t>(T);
  nn::Tensor res({2 * T * (T - 1)});
  auto each = [T, T_](auto&& f) {
    std::size_t block = 0;
    for (std::ptrdiff_t delta = -(T_ - 1); delta <= T_ - 1; ++delta) {
      if (delta == 0) continue;
      for (std::ptrdiff_t t = 0; t < T_; ++t) {
        const std::ptrdiff_t j = t + delta;
        if (j >= 0 && j < T_) f(block * T + static_cast<std::size_t>(t), static_cast<std::size_t>(t),
                                static_cast<std::size_t>(j));
      }
      ++block;
    }
  };
  const double* a = A.data().data();
  const double* b = B.data().data();
  each([&](std::size_t k, std::size_t t, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < W; ++c) s += a[t * W + c] * b[j * W + c];
    res[k] = s;
  });
  const int ia = in.id, ib = out.id;
  return in.g->record(std::move(res), {in, out}, [ia, ib, W, each](nn::Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    const double* a = gr.value(ia).data().data();
    const double* b = gr.value(ib).data().data();
    double* ga = gr.needs_grad(ia) ? gr.grad(ia).data().data() : nullptr;
    double* gb = gr.needs_grad(ib) ? gr.grad(ib).data().data() : nullptr;
    each([&](std::size_t k, std::size_t t, std::size_t j) {
      const double g = gy[k];
      if (g == 0.0) return;
      for (std::size_t c = 0; c < W; ++c) {
        if (ga) ga[t * W + c] += g * b[j * W + c];
        if (gb) gb[j * W + c] += g * a[t * W + c];
      }
    });
  });
}

IoEncoder::IoEncoder(nn::ParamStore& store, const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  embedding_ = &store.add_uniform("enc.embed", {Charset::kSize, cfg_.embed_dim}, nn::kInitBound, rng);
  input_rnn_ = nn::BiLstm(store, "enc.in", cfg_.embed_dim, cfg_.H, rng);
  output_rnn_ = nn::BiLstm(store, "enc.out", cfg_.embed_dim, cfg_.H, rng);
}

nn::Var IoEncoder::embed(nn::Graph& g, std::string_view s) const {
  bool cut = false;
  const auto idx = char_indices(s, cfg_.T, &cut);
  if (cut) ++truncations_;
  return nn::gather_rows(g.param(*embedding_), idx);
}

nn::Var IoEncoder::encode_string(nn::Graph& g, std::string_view s, bool is_output) const {
  return (is_output ? output_rnn_ : input_rnn_).encode(g, embed(g, s));
}

nn::Var IoEncoder::encode_pair(nn::Graph& g, const ExamplePair& pair) const {
  return cross_correlate(encode_string(g, pair.input, false), encode_string(g, pair.output, true));
}

nn::Var IoEncoder::encode(nn::Graph& g, std::span<const ExamplePair> pairs) const {
  if (pairs.empty()) throw std::invalid_argument("encoding needs at least one example pair");
  std::vector<nn::Var> parts;
  parts.reserve(pairs.size());
  for (const ExamplePair& p : pairs) parts.push_back(encode_pair(g, p));
  return parts.size() == 1 ? parts.front() : nn::mean(parts);
}

}  // namespace dapip
