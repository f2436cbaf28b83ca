#include "traindx/tensor.hpp"

#include <cmath>

namespace traindx {

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shapes " + a.shape_str() + " and " +
                     b.shape_str() + " do not match");
  }
}

void require_nonempty(const char* op, const Tensor& t) {
  if (t.empty()) {
    throw ShapeError(std::string(op) + ": tensor is empty");
  }
}

}  // namespace

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Tensor t(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw ShapeError("from_rows: row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(c));
    }
    std::size_t j = 0;
    for (double v : row) t(i, j++) = v;
    ++i;
  }
  return t;
}

Tensor Tensor::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") out of bounds for " + shape_str());
  }
  Tensor out(end - begin, cols_);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i - begin, j) = (*this)(i, j);
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shapes " + a.shape_str() + " and " + b.shape_str() +
                     " are incompatible");
  }
  Tensor out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  require_same_shape("subtract", a, b);
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape("hadamard", a, b);
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor scale(const Tensor& a, double s) {
  Tensor out = a;
  for (double& x : out.data()) x *= s;
  return out;
}

Tensor map(const Tensor& a, const std::function<double(double)>& fn) {
  Tensor out = a;
  for (double& x : out.data()) x = fn(x);
  return out;
}

double mean(const Tensor& t) {
  require_nonempty("mean", t);
  double sum = 0.0;
  for (double x : t.data()) sum += x;
  return sum / static_cast<double>(t.size());
}

double variance(const Tensor& t) {
  require_nonempty("variance", t);
  double mu = mean(t);
  double acc = 0.0;
  for (double x : t.data()) {
    double d = x - mu;
    acc += d * d;
  }
  return acc / static_cast<double>(t.size());
}

double mean_abs(const Tensor& t) {
  require_nonempty("mean_abs", t);
  double sum = 0.0;
  for (double x : t.data()) sum += std::fabs(x);
  return sum / static_cast<double>(t.size());
}

double frobenius_norm(const Tensor& t) {
  double acc = 0.0;
  for (double x : t.data()) acc += x * x;
  return std::sqrt(acc);
}

double min_element(const Tensor& t) {
  require_nonempty("min_element", t);
  double m = t.data()[0];
  for (double x : t.data())
    if (x < m) m = x;
  return m;
}

double max_element(const Tensor& t) {
  require_nonempty("max_element", t);
  double m = t.data()[0];
  for (double x : t.data())
    if (x > m) m = x;
  return m;
}

bool has_nonfinite(const Tensor& t) {
  for (double x : t.data())
    if (!std::isfinite(x)) return true;
  return false;
}

bool all_zero(const Tensor& t) {
  if (t.empty()) return false;
  for (double x : t.data())
    if (x != 0.0) return false;
  return true;
}

}  // namespace traindx
