#include "dapip/nn/layers.hpp"

#include <cmath>

namespace dapip::nn {

Linear::Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
               double bound)
    : w_(&store.add_uniform(name + ".w", {in, out}, bound, rng)),
      b_(&store.add(name + ".b", Tensor({out}))),
      in_(in),
      out_(out) {}

Var Linear::operator()(Graph& g, Var x) const {
  const Var y = matmul(x, g.param(*w_));
  return y.value().rank() == 1 ? add(y, g.param(*b_)) : add_row_vector(y, g.param(*b_));
}

Mlp::Mlp(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden, std::size_t out,
         Rng& rng)
    : hidden_(store, name + ".hidden", in, hidden, rng),
      out_(store, name + ".out", hidden, out, rng) {}

Var Mlp::operator()(Graph& g, Var x) const { return out_(g, tanh(hidden_(g, x))); }

Lstm::Lstm(ParamStore& store, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng)
    : hidden_(hidden) {
  wx_ = &store.add_uniform(name + ".wx", {input, 4 * hidden}, kInitBound, rng);
  wh_ = &store.add_uniform(name + ".wh", {hidden, 4 * hidden}, kInitBound, rng);
  Tensor b({4 * hidden});
  for (std::size_t i = hidden; i < 2 * hidden; ++i) b[i] = 1.0;
  b_ = &store.add(name + ".b", std::move(b));
}

std::vector<Var> Lstm::run(Graph& g, Var xs, bool reverse) const {
  const std::size_t steps = xs.value().rows();
  const std::size_t H = hidden_;
  // Input projections for every step at once.
  const Var proj = add_row_vector(matmul(xs, g.param(*wx_)), g.param(*b_));
  const Var wh = g.param(*wh_);
  std::vector<Var> hs(steps);
  Var h, c;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    Var pre = row(proj, t);
    if (h.valid()) pre = add(pre, matmul(h, wh));
    const Var gates = sigmoid(pre);
    const Var i = slice(gates, 0, H);
    const Var f = slice(gates, H, H);
    const Var o = slice(gates, 3 * H, H);
    const Var cand = tanh(slice(pre, 2 * H, H));
    c = c.valid() ? add(mul(f, c), mul(i, cand)) : mul(i, cand);
    h = mul(o, tanh(c));
    hs[t] = h;
  }
  return hs;
}

BiLstm::BiLstm(ParamStore& store, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng)
    : fwd_(store, name + ".fwd", input, hidden, rng), bwd_(store, name + ".bwd", input, hidden, rng) {}

Var BiLstm::encode(Graph& g, Var xs) const {
  const auto f = fwd_.run(g, xs, false);
  const auto b = bwd_.run(g, xs, true);
  std::vector<Var> rows;
  rows.reserve(f.size());
  for (std::size_t t = 0; t < f.size(); ++t) rows.push_back(concat({f[t], b[t]}));
  return stack_rows(rows);
}

}  // namespace dapip::nn
