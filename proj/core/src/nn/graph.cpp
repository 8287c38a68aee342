#include "dapip/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dapip/errors.hpp"

namespace dapip::nn {

const Tensor& Var::value() const { return g->value(*this); }

Var Graph::make(Node n) {
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return make(std::move(n));
}

Var Graph::param(Parameter& p) {
  if (const auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  Node n;
  n.needs_grad = track_;
  n.param = &p;
  const Var v = make(std::move(n));
  param_nodes_[&p] = v.id;
  return v;
}

Tensor& Graph::grad(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.has_grad) {
    n.grad = Tensor(value(id).shape());
    n.has_grad = true;
  }
  return n.grad;
}

Var Graph::record(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Graph::record(Tensor value, std::span<const Var> inputs, Backward backward) {
  Node n;
  n.value = std::move(value);
  if (track_) {
    n.needs_grad = std::any_of(inputs.begin(), inputs.end(), [&](Var v) { return needs_grad(v.id); });
    if (n.needs_grad) n.backward = std::move(backward);
  }
  return make(std::move(n));
}

void Graph::backward(Var loss) {
  if (!track_) throw std::logic_error("backward() on an untracked graph");
  if (value(loss).size() != 1) throw ShapeMismatch("backward() needs a scalar loss");
  grad(loss.id)[0] += 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.has_grad) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param) {
      auto dst = n.param->grad.data();
      const auto src = n.grad.data();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

Graph& graph_of(Var a) {
  if (!a.g) throw std::invalid_argument("operation on an empty Var");
  return *a.g;
}

Graph& graph_of(Var a, Var b) {
  if (a.g != b.g) throw std::invalid_argument("operands belong to different graphs");
  return graph_of(a);
}

void require_vector(const Tensor& t, const char* what) {
  if (t.rank() != 1) throw ShapeMismatch(std::string(what) + " expects a vector, got " + t.shape_string());
}

template <class F>
Var unary(Var a, F f, double (*df)(double x, double y)) {
  Graph& g = graph_of(a);
  Tensor out = a.value();
  for (double& x : out.data()) x = f(x);
  const int ia = a.id;
  return g.record(std::move(out), {a}, [ia, df](Graph& gr, int self) {
    const auto x = gr.value(ia).data();
    const auto y = gr.value(self).data();
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(ia).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * df(x[i], y[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (B.rank() != 2 || (A.rank() != 1 && A.rank() != 2) || A.cols() != B.rows()) {
    throw ShapeMismatch("matmul " + A.shape_string() + " x " + B.shape_string());
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C = A.rank() == 1 ? Tensor({n}) : Tensor({m, n});
  const double* pa = A.data().data();
  const double* pb = B.data().data();
  double* pc = C.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      double* crow = pc + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  const int ia = a.id, ib = b.id;
  return g.record(std::move(C), {a, b}, [ia, ib, m, k, n](Graph& gr, int self) {
    const double* gc = gr.grad(self).data().data();
    if (gr.needs_grad(ia)) {
      // dA = dC · Bᵀ
      const double* pb = gr.value(ib).data().data();
      double* ga = gr.grad(ia).data().data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = pb + p * n;
          const double* crow = gc + i * n;
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += crow[j] * brow[j];
          ga[i * k + p] += s;
        }
      }
    }
    if (gr.needs_grad(ib)) {
      // dB = Aᵀ · dC
      const double* pa = gr.value(ia).data().data();
      double* gb = gr.grad(ib).data().data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double av = pa[i * k + p];
          if (av == 0.0) continue;
          const double* crow = gc + i * n;
          double* brow = gb + p * n;
          for (std::size_t j = 0; j < n; ++j) brow[j] += av * crow[j];
        }
      }
    }
  });
}

Var add(Var a, Var b) {
  Graph& g = graph_of(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  const auto bd = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bd[i];
  const int ia = a.id, ib = b.id;
  return g.record(std::move(out), {a, b}, [ia, ib](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    for (int in : {ia, ib}) {
      if (!gr.needs_grad(in)) continue;
      auto gx = gr.grad(in).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
  });
}

Var sub(Var a, Var b) {
  Graph& g = graph_of(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  const auto bd = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bd[i];
  const int ia = a.id, ib = b.id;
  return g.record(std::move(out), {a, b}, [ia, ib](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    if (gr.needs_grad(ia)) {
      auto gx = gr.grad(ia).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
    if (gr.needs_grad(ib)) {
      auto gx = gr.grad(ib).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] -= gy[i];
    }
  });
}

Var mul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  const auto bd = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bd[i];
  const int ia = a.id, ib = b.id;
  return g.record(std::move(out), {a, b}, [ia, ib](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    if (gr.needs_grad(ia)) {
      const auto bv = gr.value(ib).data();
      auto gx = gr.grad(ia).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * bv[i];
    }
    if (gr.needs_grad(ib)) {
      const auto av = gr.value(ia).data();
      auto gx = gr.grad(ib).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * av[i];
    }
  });
}

Var scale(Var a, double s) {
  Graph& g = graph_of(a);
  Tensor out = a.value();
  for (double& x : out.data()) x *= s;
  const int ia = a.id;
  return g.record(std::move(out), {a}, [ia, s](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(ia).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += s * gy[i];
  });
}

Var add_row_vector(Var m, Var v) {
  Graph& g = graph_of(m, v);
  const Tensor& M = m.value();
  const Tensor& V = v.value();
  require_vector(V, "add_row_vector");
  if (M.rank() != 2 || M.cols() != V.size()) {
    throw ShapeMismatch("add_row_vector " + M.shape_string() + " + " + V.shape_string());
  }
  Tensor out = M;
  const std::size_t rows = M.rows(), cols = M.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += V[c];
  }
  const int im = m.id, iv = v.id;
  return g.record(std::move(out), {m, v}, [im, iv, rows, cols](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    if (gr.needs_grad(im)) {
      auto gx = gr.grad(im).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    }
    if (gr.needs_grad(iv)) {
      auto gx = gr.grad(iv).data();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) gx[c] += gy[r * cols + c];
      }
    }
  });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        // Split by sign so exp never overflows.
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeMismatch("concat of nothing");
  Graph& g = graph_of(parts.front());
  std::vector<double> data;
  std::vector<std::pair<int, std::size_t>> pieces;  // (id, offset)
  for (Var p : parts) {
    graph_of(parts.front(), p);
    require_vector(p.value(), "concat");
    pieces.emplace_back(p.id, data.size());
    data.insert(data.end(), p.value().data().begin(), p.value().data().end());
  }
  return g.record(Tensor::vector(std::move(data)), parts, [pieces = std::move(pieces)](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    for (const auto& [id, off] : pieces) {
      if (!gr.needs_grad(id)) continue;
      auto gx = gr.grad(id).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[off + i];
    }
  });
}

Var slice(Var v, std::size_t offset, std::size_t length) {
  Graph& g = graph_of(v);
  const Tensor& V = v.value();
  require_vector(V, "slice");
  if (offset + length > V.size()) throw ShapeMismatch("slice out of range of " + V.shape_string());
  std::vector<double> data(V.data().begin() + static_cast<std::ptrdiff_t>(offset),
                           V.data().begin() + static_cast<std::ptrdiff_t>(offset + length));
  const int iv = v.id;
  return g.record(Tensor::vector(std::move(data)), {v}, [iv, offset](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(iv).data();
    for (std::size_t i = 0; i < gy.size(); ++i) gx[offset + i] += gy[i];
  });
}

Var row(Var m, std::size_t r) {
  Graph& g = graph_of(m);
  const Tensor& M = m.value();
  if (M.rank() != 2 || r >= M.rows()) throw ShapeMismatch("row " + std::to_string(r) + " of " + M.shape_string());
  const std::size_t cols = M.cols();
  std::vector<double> data(M.data().begin() + static_cast<std::ptrdiff_t>(r * cols),
                           M.data().begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
  const int im = m.id;
  return g.record(Tensor::vector(std::move(data)), {m}, [im, r, cols](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(im).data();
    for (std::size_t i = 0; i < cols; ++i) gx[r * cols + i] += gy[i];
  });
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw ShapeMismatch("stack_rows of nothing");
  Graph& g = graph_of(rows.front());
  const std::size_t cols = rows.front().value().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  std::vector<int> ids;
  for (Var r : rows) {
    graph_of(rows.front(), r);
    require_vector(r.value(), "stack_rows");
    if (r.value().size() != cols) throw ShapeMismatch("stack_rows with ragged rows");
    data.insert(data.end(), r.value().data().begin(), r.value().data().end());
    ids.push_back(r.id);
  }
  return g.record(Tensor::matrix(rows.size(), cols, std::move(data)), rows,
                  [ids = std::move(ids), cols](Graph& gr, int self) {
                    const auto gy = gr.grad(self).data();
                    for (std::size_t r = 0; r < ids.size(); ++r) {
                      if (!gr.needs_grad(ids[r])) continue;
                      auto gx = gr.grad(ids[r]).data();
                      for (std::size_t c = 0; c < cols; ++c) gx[c] += gy[r * cols + c];
                    }
                  });
}

Var gather_rows(Var table, std::span<const std::size_t> indices) {
  Graph& g = graph_of(table);
  const Tensor& W = table.value();
  if (W.rank() != 2) throw ShapeMismatch("gather_rows expects a matrix");
  const std::size_t cols = W.cols();
  Tensor out({indices.size(), cols});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= W.rows()) throw ShapeMismatch("gather_rows index out of range");
    std::copy_n(W.data().begin() + static_cast<std::ptrdiff_t>(indices[r] * cols), cols,
                out.data().begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  const int it = table.id;
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return g.record(std::move(out), {table}, [it, cols, idx = std::move(idx)](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(it).data();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) gx[idx[r] * cols + c] += gy[r * cols + c];
    }
  });
}

Var gather(Var v, std::span<const std::size_t> indices) {
  Graph& g = graph_of(v);
  const Tensor& V = v.value();
  require_vector(V, "gather");
  std::vector<double> data;
  data.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= V.size()) throw ShapeMismatch("gather index out of range");
    data.push_back(V[i]);
  }
  const int iv = v.id;
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return g.record(Tensor::vector(std::move(data)), {v}, [iv, idx = std::move(idx)](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(iv).data();
    for (std::size_t i = 0; i < idx.size(); ++i) gx[idx[i]] += gy[i];
  });
}

Var dot(Var a, Var b) {
  Graph& g = graph_of(a, b);
  require_same_shape(a.value(), b.value(), "dot");
  const auto ad = a.value().data(), bd = b.value().data();
  double s = 0.0;
  for (std::size_t i = 0; i < ad.size(); ++i) s += ad[i] * bd[i];
  const int ia = a.id, ib = b.id;
  return g.record(Tensor::scalar(s), {a, b}, [ia, ib](Graph& gr, int self) {
    const double gy = gr.grad(self)[0];
    if (gr.needs_grad(ia)) {
      const auto bv = gr.value(ib).data();
      auto gx = gr.grad(ia).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy * bv[i];
    }
    if (gr.needs_grad(ib)) {
      const auto av = gr.value(ia).data();
      auto gx = gr.grad(ib).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy * av[i];
    }
  });
}

Var sum(Var a) {
  Graph& g = graph_of(a);
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  const int ia = a.id;
  return g.record(Tensor::scalar(s), {a}, [ia](Graph& gr, int self) {
    const double gy = gr.grad(self)[0];
    for (double& x : gr.grad(ia).data()) x += gy;
  });
}

Var mean(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeMismatch("mean of nothing");
  Graph& g = graph_of(parts.front());
  Tensor out(parts.front().value().shape());
  std::vector<int> ids;
  for (Var p : parts) {
    graph_of(parts.front(), p);
    require_same_shape(out, p.value(), "mean");
    const auto d = p.value().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
    ids.push_back(p.id);
  }
  const double w = 1.0 / static_cast<double>(parts.size());
  for (double& x : out.data()) x *= w;
  return g.record(std::move(out), parts, [ids = std::move(ids), w](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    for (int id : ids) {
      if (!gr.needs_grad(id)) continue;
      auto gx = gr.grad(id).data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += w * gy[i];
    }
  });
}

Var reshape(Var a, std::span<const std::size_t> shape) {
  Graph& g = graph_of(a);
  const int ia = a.id;
  return g.record(a.value().reshaped(shape), {a}, [ia](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    auto gx = gr.grad(ia).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
  });
}

namespace {

double max_of(std::span<const double> d) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : d) m = std::max(m, x);
  return m;
}

}  // namespace

Var logsumexp(Var v) {
  Graph& g = graph_of(v);
  require_vector(v.value(), "logsumexp");
  const auto d = v.value().data();
  if (d.empty()) throw ShapeMismatch("logsumexp of an empty vector");
  const double m = max_of(d);
  double s = 0.0;
  for (double x : d) s += std::exp(x - m);
  const double lse = m + std::log(s);
  const int iv = v.id;
  return g.record(Tensor::scalar(lse), {v}, [iv, lse](Graph& gr, int self) {
    const double gy = gr.grad(self)[0];
    const auto x = gr.value(iv).data();
    auto gx = gr.grad(iv).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy * std::exp(x[i] - lse);
  });
}

Var log_softmax(Var v) {
  Graph& g = graph_of(v);
  require_vector(v.value(), "log_softmax");
  const auto d = v.value().data();
  if (d.empty()) throw ShapeMismatch("log_softmax of an empty vector");
  const double m = max_of(d);
  double s = 0.0;
  for (double x : d) s += std::exp(x - m);
  const double lse = m + std::log(s);
  Tensor out = v.value();
  for (double& x : out.data()) x -= lse;
  const int iv = v.id;
  return g.record(std::move(out), {v}, [iv](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    const auto y = gr.value(self).data();
    double total = 0.0;
    for (double x : gy) total += x;
    auto gx = gr.grad(iv).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] - std::exp(y[i]) * total;
  });
}

Var softmax(Var v) {
  Graph& g = graph_of(v);
  require_vector(v.value(), "softmax");
  const auto d = v.value().data();
  if (d.empty()) throw ShapeMismatch("softmax of an empty vector");
  const double m = max_of(d);
  Tensor out = v.value();
  double s = 0.0;
  for (double& x : out.data()) s += (x = std::exp(x - m));
  for (double& x : out.data()) x /= s;
  const int iv = v.id;
  return g.record(std::move(out), {v}, [iv](Graph& gr, int self) {
    const auto gy = gr.grad(self).data();
    const auto y = gr.value(self).data();
    double inner = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) inner += gy[i] * y[i];
    auto gx = gr.grad(iv).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += y[i] * (gy[i] - inner);
  });
}

}  // namespace dapip::nn
