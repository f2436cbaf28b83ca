#include "traindx/detectors.hpp"

#include <cmath>

namespace traindx {

bool exploding_tensor(const Tensor& t) {
  double m = mean(t);
  if (std::isnan(m) || std::isinf(m)) return true;
  return all_zero(t);
}

bool unchanged_value(const Tensor& current, History& hist, const MonitorConfig& cfg) {
  double m = mean(current);
  bool fired = false;
  if (hist.at_evaluation_point()) {
    double reference = hist.mean();
    double tolerance = cfg.unchanged_rel_tolerance * std::max(1.0, std::fabs(m));
    fired = std::fabs(m - reference) <= tolerance;
  }
  hist.push(m);
  return fired;
}

bool saturated_activation(const Tensor& v1, ActivationFn activation,
                          const MonitorConfig& cfg) {
  if (activation != ActivationFn::Sigmoid && activation != ActivationFn::Tanh) return false;
  std::size_t saturated = 0;
  for (double x : v1.data())
    if (x >= cfg.saturation_max || x <= cfg.saturation_min) ++saturated;
  double fraction = static_cast<double>(saturated) / static_cast<double>(v1.size());
  return fraction > cfg.saturation_layer_ratio;
}

bool dead_node(const Tensor& v2, ActivationFn activation, const MonitorConfig& cfg) {
  if (activation != ActivationFn::Relu) return false;
  std::size_t dead = 0;
  for (double x : v2.data())
    if (x <= cfg.dead_node_threshold) ++dead;
  double fraction = static_cast<double>(dead) / static_cast<double>(v2.size());
  return fraction > cfg.dead_node_layer_ratio;
}

bool out_of_range(const Tensor& v2_last, const Tensor& y) {
  return min_element(v2_last) < min_element(y) || max_element(v2_last) > max_element(y);
}

bool loss_not_decreasing(double loss, History& hist, const MonitorConfig&) {
  bool fired = false;
  if (hist.at_evaluation_point()) fired = loss >= hist.mean();
  hist.push(loss);
  return fired;
}

bool accuracy_not_increasing(double accuracy, History& hist, const MonitorConfig&) {
  bool fired = false;
  if (hist.at_evaluation_point()) fired = accuracy <= hist.mean();
  hist.push(accuracy);
  return fired;
}

bool vanishing_gradient(const Tensor& dw, const MonitorConfig& cfg) {
  double m = mean_abs(dw);
  return m > 0.0 && m < cfg.vanishing_threshold;
}

}  // namespace traindx
