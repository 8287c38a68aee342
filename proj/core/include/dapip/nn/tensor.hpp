#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dapip::nn {

/// Dense row-major tensor of doubles with rank 0 to 3.
///
/// Vectors are rank 1 and are treated as row vectors by the linear algebra
/// below, so a linear layer is x·W + b with W shaped [in, out].
class Tensor {
 public:
  static constexpr std::size_t kMaxRank = 3;

  Tensor() = default;  // scalar 0
  Tensor(std::initializer_list<std::size_t> shape, double fill = 0.0);
  Tensor(std::span<const std::size_t> shape, double fill = 0.0);
  Tensor(std::span<const std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor vector(std::vector<double> data);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rank() const { return rank_; }
  std::span<const std::size_t> shape() const { return {dims_.data(), rank_}; }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t size() const { return data_.size(); }
  /// Rank-2 accessors; a vector is a single row.
  std::size_t rows() const { return rank_ == 2 ? dims_[0] : 1; }
  std::size_t cols() const { return rank_ == 0 ? 1 : dims_[rank_ - 1]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  /// Scalar value of a one-element tensor.
  double item() const;

  bool same_shape(const Tensor& other) const;
  bool all_finite() const;
  void fill(double v);
  /// Reinterprets the data under a new shape of equal element count.
  Tensor reshaped(std::span<const std::size_t> shape) const;

  std::string shape_string() const;
  bool operator==(const Tensor& other) const;

 private:
  std::size_t rank_ = 0;
  std::array<std::size_t, kMaxRank> dims_{};
  std::vector<double> data_ = {0.0};
};

/// Throws ShapeMismatch with `what` when the shapes differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace dapip::nn
