#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace traindx {

/// Error thrown when operand shapes are incompatible. The message names the
/// operation and both shapes.
class ShapeError : public std::runtime_error {
public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major matrix of doubles. Inputs, weights, activations and
/// gradients are all carried as tensors. Every reduction accumulates in
/// row-major order so repeated runs are bit-identical.
class Tensor {
public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor(rows, cols); }

  static Tensor full(std::size_t rows, std::size_t cols, double value) {
    Tensor t(rows, cols);
    for (double& x : t.data_) x = value;
    return t;
  }

  static Tensor identity(std::size_t n) {
    Tensor t(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
  }

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  /// Rows [begin, end) as a new tensor.
  Tensor slice_rows(std::size_t begin, std::size_t end) const;

  bool operator==(const Tensor& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Elementwise and linear-algebra operations. Shape mismatches throw ShapeError.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor scale(const Tensor& a, double s);
Tensor map(const Tensor& a, const std::function<double(double)>& fn);

// Statistics over all elements, accumulated in row-major order.
double mean(const Tensor& t);
double variance(const Tensor& t);  // population variance
double mean_abs(const Tensor& t);
double frobenius_norm(const Tensor& t);
double min_element(const Tensor& t);
double max_element(const Tensor& t);
bool has_nonfinite(const Tensor& t);
bool all_zero(const Tensor& t);

}  // namespace traindx
