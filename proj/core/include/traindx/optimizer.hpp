#pragma once

#include <vector>

#include "traindx/model.hpp"

namespace traindx {

/// Per-layer accumulator state for rmsprop/adam; sgd keeps none. Slots align
/// with model layers, empty for layers without weights.
class OptimizerState {
public:
  explicit OptimizerState(const Model& model);

  /// Applies one update from the traces' dw tensors to the model weights.
  /// Layers without a dw in the trace are left untouched.
  void step(Model& model, const std::vector<LayerTrace>& traces);

private:
  std::vector<Tensor> accum_;   // rmsprop: E[g^2]; adam: second moment
  std::vector<Tensor> moment_;  // adam: first moment
  long t_ = 0;                  // adam step counter
};

// Fixed optimizer constants.
inline constexpr double kRmspropRho = 0.9;
inline constexpr double kRmspropEps = 1e-7;
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

}  // namespace traindx
