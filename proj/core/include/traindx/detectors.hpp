#pragma once

#include <cstddef>
#include <deque>

#include "traindx/model.hpp"
#include "traindx/tensor.hpp"

namespace traindx {

/// Every tunable threshold in one record. Defaults are the reference values;
/// the CLI can override any of them from a config file or flags.
struct MonitorConfig {
  std::size_t history_window = 5;       // N: steps per windowed evaluation
  double unchanged_rel_tolerance = 1e-6;

  double saturation_max = 5.0;
  double saturation_min = -5.0;
  double saturation_layer_ratio = 0.5;  // strict: fraction must exceed this

  double dead_node_threshold = 0.0;
  double dead_node_layer_ratio = 0.7;   // strict: fraction must exceed this

  double vanishing_threshold = 1e-7;

  double data_range_low = -1.0;
  double data_range_high = 1.0;

  double weight_var_min = 1e-5;
  double weight_var_max = 10.0;

  double learn_threshold = 1e-3;        // healthy update/weight ratio
  double learn_band_factor = 10.0;      // band half-width, multiplicative

  int depth_max_layers = 8;             // parameterized layers beyond this: too deep

  bool operator==(const MonitorConfig&) const = default;
};

/// Sliding window over the last `window` scalars plus a count of every value
/// ever pushed. Windowed detectors compare the current value against the
/// stored window, then push it; they evaluate only when the window is full
/// and the push count is a multiple of the window, i.e. at steps N+1, 2N+1...
class History {
public:
  explicit History(std::size_t window) : window_(window) {}

  void push(double v) {
    values_.push_back(v);
    if (values_.size() > window_) values_.pop_front();
    ++total_;
  }

  bool full() const { return values_.size() == window_; }
  std::size_t total() const { return total_; }
  std::size_t window() const { return window_; }

  double mean() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return values_.empty() ? 0.0 : sum / static_cast<double>(values_.size());
  }

  /// True exactly at the evaluation steps described above.
  bool at_evaluation_point() const { return full() && total_ % window_ == 0; }

  bool operator==(const History&) const = default;

private:
  std::size_t window_;
  std::deque<double> values_;
  std::size_t total_ = 0;
};

// Symptom detectors. Each is a pure function of its inputs, the config and
// the explicit history; windowed detectors advance the history they are
// given as a side effect so callers keep one History per monitored series.

/// S1: numerical error. Fires when mean(t) is NaN or +/-inf, or when every
/// element is exactly zero.
bool exploding_tensor(const Tensor& t);

/// S2: value unchanged. Compares mean(current) against the mean of the last
/// N stored means under a relative tolerance. False until the window is full;
/// evaluates every N steps.
bool unchanged_value(const Tensor& current, History& hist, const MonitorConfig& cfg);

/// S3: saturated activation, sigmoid/tanh layers only. Fires when the
/// fraction of pre-activations at or beyond the saturation bounds exceeds
/// the layer ratio.
bool saturated_activation(const Tensor& v1, ActivationFn activation,
                          const MonitorConfig& cfg);

/// S4: dead nodes, relu layers only. Fires when the fraction of outputs at
/// or below the dead threshold exceeds the layer ratio.
bool dead_node(const Tensor& v2, ActivationFn activation, const MonitorConfig& cfg);

/// S5: output out of range. Fires when [min(v2), max(v2)] is not contained
/// in [min(y), max(y)].
bool out_of_range(const Tensor& v2_last, const Tensor& y);

/// S6: loss not decreasing. Fires when the current loss is >= the window
/// mean at an evaluation step.
bool loss_not_decreasing(double loss, History& hist, const MonitorConfig& cfg);

/// S7: accuracy not increasing. Fires when the current accuracy is <= the
/// window mean at an evaluation step.
bool accuracy_not_increasing(double accuracy, History& hist, const MonitorConfig& cfg);

/// S8: vanishing gradient. Fires when mean(|dw|) is positive but below the
/// vanishing threshold. An exactly zero gradient tensor is a numerical
/// error (S1), not a vanishing trend.
bool vanishing_gradient(const Tensor& dw, const MonitorConfig& cfg);

}  // namespace traindx
