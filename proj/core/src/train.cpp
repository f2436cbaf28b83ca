#include "traindx/train.hpp"

#include <stdexcept>

#include "traindx/optimizer.hpp"

namespace traindx {

TrainOutcome train(Model& model, const Tensor& x, const Tensor& y, const TrainHooks& hooks) {
  if (x.rows() != y.rows()) {
    throw ShapeError("train: inputs " + x.shape_str() + " vs labels " + y.shape_str() +
                     " row counts differ");
  }
  if (x.rows() == 0) throw std::invalid_argument("train: empty dataset");

  const ModelSpec& spec = model.spec();
  OptimizerState opt(model);
  TrainOutcome outcome;

  std::size_t batch_size = static_cast<std::size_t>(spec.batch_size);
  for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
    int batch = 0;
    for (std::size_t row = 0; row < x.rows(); row += batch_size) {
      ++batch;
      std::size_t end = std::min(row + batch_size, x.rows());
      Tensor bx = x.slice_rows(row, end);
      Tensor by = y.slice_rows(row, end);

      std::vector<LayerTrace> traces = forward(model, bx);
      ++outcome.steps;
      outcome.last_forward = traces;

      if (hooks.after_forward) {
        if (auto s = hooks.after_forward(traces, by, epoch, batch)) {
          outcome.verdict = s;
          return outcome;
        }
      }

      StepMetrics metrics;
      metrics.epoch = epoch;
      metrics.batch = batch;
      metrics.loss = compute_loss(traces.back().v2, by, spec.loss, spec.clamp_crossentropy);
      metrics.accuracy = compute_accuracy(traces.back().v2, by, spec.task);
      outcome.last_metrics = metrics;

      if (hooks.after_metrics) {
        if (auto s = hooks.after_metrics(metrics)) {
          outcome.verdict = s;
          return outcome;
        }
      }

      backward(model, traces, bx, by);
      outcome.last_backward = traces;

      if (hooks.after_backward) {
        if (auto s = hooks.after_backward(traces, epoch, batch)) {
          outcome.verdict = s;
          return outcome;
        }
      }

      opt.step(model, traces);
    }
  }
  return outcome;
}

}  // namespace traindx
