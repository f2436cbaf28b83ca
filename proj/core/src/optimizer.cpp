#include "traindx/optimizer.hpp"

#include <cmath>

namespace traindx {

OptimizerState::OptimizerState(const Model& model) {
  accum_.resize(model.layer_count());
  moment_.resize(model.layer_count());
  for (std::size_t i = 1; i <= model.layer_count(); ++i) {
    if (!model.has_weights(i)) continue;
    const Tensor& w = model.layer_weights(i);
    if (model.spec().optimizer != OptimizerKind::Sgd)
      accum_[i - 1] = Tensor::zeros(w.rows(), w.cols());
    if (model.spec().optimizer == OptimizerKind::Adam)
      moment_[i - 1] = Tensor::zeros(w.rows(), w.cols());
  }
}

void OptimizerState::step(Model& model, const std::vector<LayerTrace>& traces) {
  double lr = model.spec().learning_rate;
  if (model.spec().optimizer == OptimizerKind::Adam) ++t_;
  for (const LayerTrace& trace : traces) {
    if (!trace.dw) continue;
    Tensor& w = model.layer_weights(trace.layer_index);
    const Tensor& dw = *trace.dw;
    switch (model.spec().optimizer) {
      case OptimizerKind::Sgd: {
        for (std::size_t k = 0; k < w.size(); ++k) w.data()[k] -= lr * dw.data()[k];
        break;
      }
      case OptimizerKind::Rmsprop: {
        Tensor& a = accum_[trace.layer_index - 1];
        for (std::size_t k = 0; k < w.size(); ++k) {
          double g = dw.data()[k];
          a.data()[k] = kRmspropRho * a.data()[k] + (1.0 - kRmspropRho) * g * g;
          w.data()[k] -= lr * g / (std::sqrt(a.data()[k]) + kRmspropEps);
        }
        break;
      }
      case OptimizerKind::Adam: {
        Tensor& m = moment_[trace.layer_index - 1];
        Tensor& v = accum_[trace.layer_index - 1];
        double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t_));
        double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t_));
        for (std::size_t k = 0; k < w.size(); ++k) {
          double g = dw.data()[k];
          m.data()[k] = kAdamBeta1 * m.data()[k] + (1.0 - kAdamBeta1) * g;
          v.data()[k] = kAdamBeta2 * v.data()[k] + (1.0 - kAdamBeta2) * g * g;
          double mhat = m.data()[k] / bc1;
          double vhat = v.data()[k] / bc2;
          w.data()[k] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
        }
        break;
      }
    }
  }
}

}  // namespace traindx
