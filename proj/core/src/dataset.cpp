#include "traindx/dataset.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "traindx/rng.hpp"

namespace traindx {

namespace {

constexpr double kPi = 3.14159265358979323846;

Tensor labels_for_classes(const std::vector<int>& classes, LabelKind kind, int class_count) {
  if (kind == LabelKind::OneHot) {
    Tensor y(classes.size(), class_count);
    for (std::size_t i = 0; i < classes.size(); ++i) y(i, classes[i]) = 1.0;
    return y;
  }
  Tensor y(classes.size(), 1);
  for (std::size_t i = 0; i < classes.size(); ++i) y(i, 0) = classes[i];
  return y;
}

/// Per-column min-max rescale into [-1, 1]; constant columns collapse to 0.
void normalize_columns(Tensor& x) {
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    for (std::size_t i = 0; i < x.rows(); ++i)
      x(i, j) = hi > lo ? 2.0 * (x(i, j) - lo) / (hi - lo) - 1.0 : 0.0;
  }
}

std::pair<Tensor, Tensor> make_blobs(const DatasetSpec& spec, Rng& rng) {
  int k = spec.label_kind == LabelKind::OneHot ? spec.classes : 2;
  if (k < 2) throw std::invalid_argument("blobs: classes must be >= 2");
  double spread = spec.noise * 255.0;
  Tensor x(spec.samples, 2);
  std::vector<int> classes(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    int c = static_cast<int>(i % k);
    double angle = 2.0 * kPi * c / k + kPi / 4.0;
    x(i, 0) = 128.0 + 80.0 * std::cos(angle) + rng.normal() * spread;
    x(i, 1) = 128.0 + 80.0 * std::sin(angle) + rng.normal() * spread;
    classes[i] = c;
  }
  return {std::move(x), labels_for_classes(classes, spec.label_kind, k)};
}

std::pair<Tensor, Tensor> make_circles(const DatasetSpec& spec, Rng& rng) {
  Tensor x(spec.samples, 2);
  std::vector<int> classes(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    int c = static_cast<int>(i % 2);
    double radius = (c == 0 ? 100.0 : 45.0) + rng.normal() * spec.noise * 255.0;
    double angle = rng.uniform(0.0, 2.0 * kPi);
    x(i, 0) = 128.0 + radius * std::cos(angle);
    x(i, 1) = 128.0 + radius * std::sin(angle);
    classes[i] = c;
  }
  return {std::move(x), labels_for_classes(classes, spec.label_kind, 2)};
}

std::pair<Tensor, Tensor> make_xor(const DatasetSpec& spec, Rng& rng) {
  static constexpr double kPatterns[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  Tensor x(spec.samples, 2);
  std::vector<int> classes(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const double* p = kPatterns[i % 4];
    x(i, 0) = p[0] + rng.normal() * spec.noise;
    x(i, 1) = p[1] + rng.normal() * spec.noise;
    classes[i] = static_cast<int>(p[0]) ^ static_cast<int>(p[1]);
  }
  return {std::move(x), labels_for_classes(classes, spec.label_kind, 2)};
}

std::pair<Tensor, Tensor> make_linear_regression(const DatasetSpec& spec, Rng& rng) {
  double w0 = rng.uniform(-1.0, 1.0);
  double w1 = rng.uniform(-1.0, 1.0);
  double b = rng.uniform(-0.5, 0.5);
  Tensor x(spec.samples, 2);
  Tensor y(spec.samples, 1);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    x(i, 0) = rng.uniform(-2.0, 2.0);
    x(i, 1) = rng.uniform(-2.0, 2.0);
    y(i, 0) = w0 * x(i, 0) + w1 * x(i, 1) + b + rng.normal() * spec.noise;
  }
  return {std::move(x), std::move(y)};
}

std::pair<Tensor, Tensor> load_csv(const DatasetSpec& spec) {
  std::ifstream file(spec.source);
  if (!file) throw std::invalid_argument("dataset: cannot open '" + spec.source + "'");
  if (spec.label_cols < 1) throw std::invalid_argument("dataset: label_cols must be >= 1");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = false;
  std::size_t width = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (spec.csv_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      std::size_t consumed = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      while (consumed < cell.size() && std::isspace(static_cast<unsigned char>(cell[consumed])))
        ++consumed;
      if (consumed != cell.size() || cell.empty()) {
        throw std::invalid_argument("csv row " + std::to_string(line_no) + ", column " +
                                    std::to_string(col) + ": cannot parse '" + cell + "'");
      }
      row.push_back(value);
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw std::invalid_argument("csv row " + std::to_string(line_no) + ": expected " +
                                  std::to_string(width) + " columns, got " +
                                  std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("dataset: '" + spec.source + "' is empty");
  std::size_t labels = static_cast<std::size_t>(spec.label_cols);
  if (width <= labels) {
    throw std::invalid_argument("dataset: rows have " + std::to_string(width) +
                                " columns but " + std::to_string(labels) +
                                " label columns were requested");
  }
  Tensor x(rows.size(), width - labels);
  Tensor y(rows.size(), labels);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width - labels; ++j) x(i, j) = rows[i][j];
    for (std::size_t j = 0; j < labels; ++j) y(i, j) = rows[i][width - labels + j];
  }
  return {std::move(x), std::move(y)};
}

}  // namespace

bool is_generator_name(const std::string& name) {
  return name == "blobs" || name == "circles" || name == "xor" ||
         name == "linear_regression";
}

std::pair<Tensor, Tensor> load_or_generate(const DatasetSpec& spec) {
  if (spec.samples == 0) throw std::invalid_argument("dataset: samples must be >= 1");
  std::pair<Tensor, Tensor> data;
  if (is_generator_name(spec.source)) {
    bool regression = spec.source == "linear_regression";
    if (regression && spec.label_kind != LabelKind::Continuous)
      throw std::invalid_argument("dataset: linear_regression emits continuous labels");
    if (!regression && spec.label_kind == LabelKind::Continuous)
      throw std::invalid_argument("dataset: '" + spec.source +
                                  "' emits class labels, not continuous ones");
    Rng rng(spec.seed);
    if (spec.source == "blobs") data = make_blobs(spec, rng);
    else if (spec.source == "circles") data = make_circles(spec, rng);
    else if (spec.source == "xor") data = make_xor(spec, rng);
    else data = make_linear_regression(spec, rng);
  } else {
    data = load_csv(spec);
  }
  if (spec.normalize) normalize_columns(data.first);
  return data;
}

const char* to_string(LabelKind k) {
  switch (k) {
    case LabelKind::Binary: return "binary";
    case LabelKind::OneHot: return "one_hot";
    case LabelKind::Continuous: return "continuous";
  }
  return "?";
}

}  // namespace traindx
