#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "traindx/tensor.hpp"

namespace traindx {

enum class LabelKind { Binary, OneHot, Continuous };

/// Where training data comes from: a built-in generator name ("blobs",
/// "circles", "xor", "linear_regression") or a path to a CSV file whose
/// trailing label_cols columns are the labels. Generators emit natural-scale
/// features (pixel-like for blobs/circles); normalize rescales each feature
/// column into [-1, 1].
struct DatasetSpec {
  std::string source = "blobs";
  std::size_t samples = 100;
  double noise = 0.0;
  bool normalize = true;
  std::uint64_t seed = 0;
  LabelKind label_kind = LabelKind::Binary;
  int classes = 2;      // one_hot only
  int label_cols = 1;   // CSV only: trailing label column count
  bool csv_header = false;

  bool operator==(const DatasetSpec&) const = default;
};

bool is_generator_name(const std::string& name);

/// Returns (features, labels). Classes are interleaved sample by sample so
/// every contiguous batch stays balanced. Identical specs give identical
/// tensors.
std::pair<Tensor, Tensor> load_or_generate(const DatasetSpec& spec);

const char* to_string(LabelKind k);

}  // namespace traindx
