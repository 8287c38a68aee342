#include "dapip/nn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "dapip/errors.hpp"

namespace dapip::nn {

namespace {

std::size_t product(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::initializer_list<std::size_t> shape, double fill)
    : Tensor(std::span<const std::size_t>(shape.begin(), shape.size()), fill) {}

Tensor::Tensor(std::span<const std::size_t> shape, double fill)
    : Tensor(shape, std::vector<double>(product(shape), fill)) {}

Tensor::Tensor(std::span<const std::size_t> shape, std::vector<double> data) : data_(std::move(data)) {
  if (shape.size() > kMaxRank) throw ShapeMismatch("tensor rank above 3");
  if (data_.size() != product(shape)) {
    throw ShapeMismatch("data length " + std::to_string(data_.size()) + " does not match shape");
  }
  rank_ = shape.size();
  std::copy(shape.begin(), shape.end(), dims_.begin());
}

Tensor Tensor::scalar(double v) {
  Tensor t;
  t.data_[0] = v;
  return t;
}

Tensor Tensor::vector(std::vector<double> data) {
  const std::array<std::size_t, 1> s = {data.size()};
  return Tensor(s, std::move(data));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
  const std::array<std::size_t, 2> s = {rows, cols};
  return Tensor(s, std::move(data));
}

double Tensor::item() const {
  if (data_.size() != 1) throw ShapeMismatch("item() on tensor of shape " + shape_string());
  return data_[0];
}

bool Tensor::same_shape(const Tensor& other) const {
  return rank_ == other.rank_ && std::equal(dims_.begin(), dims_.begin() + rank_, other.dims_.begin());
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(std::span<const std::size_t> shape) const { return Tensor(shape, data_); }

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) s += ",";
    s += std::to_string(dims_[i]);
  }
  return s + "]";
}

bool Tensor::operator==(const Tensor& other) const { return same_shape(other) && data_ == other.data_; }

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(std::string(what) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

}  // namespace dapip::nn
