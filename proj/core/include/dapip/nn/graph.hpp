#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

#include "dapip/nn/params.hpp"
#include "dapip/nn/tensor.hpp"

namespace dapip::nn {

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
struct Var {
  Graph* g = nullptr;
  int id = -1;

  const Tensor& value() const;
  bool valid() const { return g != nullptr; }
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so the node
/// list is already topologically sorted for the backward sweep. Node values
/// keep their addresses as the tape grows.
///
/// A graph built with `track = false` only computes values; it records no
/// backward closures and backward() throws.
class Graph {
 public:
  using Backward = std::function<void(Graph&, int self)>;

  explicit Graph(bool track = true) : track_(track) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to a parameter; backward() adds into Parameter::grad. Each
  /// parameter maps to a single node per graph, which reads the parameter's
  /// value in place (so it must not change while the graph is in use).
  Var param(Parameter& p);

  const Tensor& value(Var v) const { return value(v.id); }
  const Tensor& value(int id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    return n.param ? n.param->value : n.value;
  }
  /// Gradient buffer of a node (allocated on first use).
  Tensor& grad(int id);
  bool needs_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }
  bool tracking() const { return track_; }
  std::size_t size() const { return nodes_.size(); }

  /// Records an op. `inputs` decide whether the result needs a gradient;
  /// `backward` must add this node's grad into the inputs that need one.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, std::span<const Var> inputs, Backward backward);

  /// Seeds d(loss)/d(loss) = 1 and sweeps the tape once. The loss must be a
  /// one-element tensor. Parameter gradients accumulate, so several graphs
  /// may contribute before an optimizer step.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool needs_grad = false;
    Backward backward;
    Parameter* param = nullptr;
  };

  Var make(Node n);

  bool track_;
  std::deque<Node> nodes_;  // stable references across appends
  std::unordered_map<const Parameter*, int> param_nodes_;
};

// ---------------------------------------------------------------------------
// Primitives. All operands must belong to the same graph. Shape errors throw
// ShapeMismatch while the graph is being built.

/// [m,k]·[k,n] -> [m,n]; a rank-1 left operand is a row vector, giving [n].
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Elementwise product.
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// Adds a vector to every row of a matrix.
Var add_row_vector(Var m, Var v);
Var tanh(Var a);
Var sigmoid(Var a);
/// Concatenation of rank-1 vectors.
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var v, std::size_t offset, std::size_t length);
Var row(Var m, std::size_t r);
/// Equal-length vectors as the rows of a matrix.
Var stack_rows(std::span<const Var> rows);
/// Rows of `table` picked by index: [indices.size(), table.cols()].
Var gather_rows(Var table, std::span<const std::size_t> indices);
/// Elements of a vector picked by index.
Var gather(Var v, std::span<const std::size_t> indices);
Var dot(Var a, Var b);
Var sum(Var a);
/// Elementwise mean of same-shaped operands.
Var mean(std::span<const Var> parts);
Var reshape(Var a, std::span<const std::size_t> shape);
Var log_softmax(Var v);
Var softmax(Var v);
Var logsumexp(Var v);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }

}  // namespace dapip::nn
