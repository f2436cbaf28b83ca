#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "traindx/model.hpp"
#include "traindx/symptoms.hpp"

namespace traindx {

/// Observation hooks invoked once per batch, in order: after the forward
/// pass, after loss/accuracy, after the backward pass. A hook returning a
/// symptom halts training within the same batch; in particular no optimizer
/// step is applied once a hook has signalled.
struct TrainHooks {
  std::function<std::optional<Symptom>(const std::vector<LayerTrace>&, const Tensor& batch_y,
                                       int epoch, int batch)>
      after_forward;
  std::function<std::optional<Symptom>(const StepMetrics&)> after_metrics;
  std::function<std::optional<Symptom>(const std::vector<LayerTrace>&, int epoch, int batch)>
      after_backward;
};

struct TrainOutcome {
  std::optional<Symptom> verdict;  // empty: completed all epochs cleanly
  int steps = 0;                   // batches executed (including a faulted one)
  StepMetrics last_metrics;
  std::vector<LayerTrace> last_forward;   // traces at the final/faulted step
  std::vector<LayerTrace> last_backward;  // most recent traces with dw filled

  bool completed() const { return !verdict.has_value(); }
};

/// Runs the configured number of epochs over (x, y) in fixed batch order
/// (no shuffling). Bit-identical inputs and seed give bit-identical metrics.
TrainOutcome train(Model& model, const Tensor& x, const Tensor& y,
                   const TrainHooks& hooks = {});

}  // namespace traindx
