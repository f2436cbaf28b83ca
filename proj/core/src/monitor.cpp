#include "traindx/monitor.hpp"

#include <chrono>
#include <cmath>

namespace traindx {

namespace {

Symptom make_symptom(SymptomCode code, Stage stage, std::optional<int> layer,
                     std::optional<Quantity> quantity, int epoch, int batch) {
  Symptom s;
  s.code = code;
  s.stage = stage;
  s.layer = layer;
  s.quantity = quantity;
  s.epoch = epoch;
  s.batch = batch;
  return s;
}

}  // namespace

std::optional<Symptom> forward_hook(const std::vector<LayerTrace>& traces,
                                    const Tensor& batch_y, MonitorState& state, int epoch,
                                    int batch) {
  const MonitorConfig& cfg = state.config();
  for (const LayerTrace& trace : traces) {
    int layer = trace.layer_index;
    if (exploding_tensor(trace.v2))
      return make_symptom(SymptomCode::NS, Stage::Forward, layer, Quantity::V2, epoch, batch);
    if (exploding_tensor(trace.v1))
      return make_symptom(SymptomCode::NS, Stage::Forward, layer, Quantity::V1, epoch, batch);
    if (unchanged_value(trace.v2, state.series(layer, Quantity::V2), cfg))
      return make_symptom(SymptomCode::UCS, Stage::Forward, layer, Quantity::V2, epoch,
                          batch);
    if (unchanged_value(trace.v1, state.series(layer, Quantity::V1), cfg))
      return make_symptom(SymptomCode::UCS, Stage::Forward, layer, Quantity::V1, epoch,
                          batch);
    if (trace.activation) {
      if (saturated_activation(trace.v1, *trace.activation, cfg))
        return make_symptom(SymptomCode::SAS, Stage::Forward, layer, Quantity::V1, epoch,
                            batch);
      if (dead_node(trace.v2, *trace.activation, cfg))
        return make_symptom(SymptomCode::DNS, Stage::Forward, layer, Quantity::V2, epoch,
                            batch);
    }
    if (layer == traces.back().layer_index && out_of_range(trace.v2, batch_y))
      return make_symptom(SymptomCode::ORS, Stage::Forward, layer, Quantity::V2, epoch,
                          batch);
  }
  return std::nullopt;
}

std::optional<Symptom> metrics_hook(const StepMetrics& metrics, MonitorState& state) {
  const MonitorConfig& cfg = state.config();
  if (std::isnan(metrics.loss) || std::isinf(metrics.loss))
    return make_symptom(SymptomCode::ILS, Stage::Global, std::nullopt, Quantity::Loss,
                        metrics.epoch, metrics.batch);
  if (metrics.accuracy) {
    double acc = *metrics.accuracy;
    if (std::isnan(acc) || std::isinf(acc) || acc == 0.0)
      return make_symptom(SymptomCode::IAS, Stage::Global, std::nullopt, Quantity::Accuracy,
                          metrics.epoch, metrics.batch);
  }
  if (loss_not_decreasing(metrics.loss, state.loss_series(), cfg))
    return make_symptom(SymptomCode::LNDS, Stage::Global, std::nullopt, Quantity::Loss,
                        metrics.epoch, metrics.batch);
  if (metrics.accuracy &&
      accuracy_not_increasing(*metrics.accuracy, state.accuracy_series(), cfg))
    return make_symptom(SymptomCode::ANIS, Stage::Global, std::nullopt, Quantity::Accuracy,
                        metrics.epoch, metrics.batch);
  return std::nullopt;
}

std::optional<Symptom> backward_hook(const std::vector<LayerTrace>& traces,
                                     MonitorState& state, int epoch, int batch) {
  const MonitorConfig& cfg = state.config();
  for (auto it = traces.rbegin(); it != traces.rend(); ++it) {
    const LayerTrace& trace = *it;
    if (!trace.dw || !trace.w) continue;
    int layer = trace.layer_index;
    if (vanishing_gradient(*trace.dw, cfg))
      return make_symptom(SymptomCode::VGS, Stage::Backward, layer, Quantity::DW, epoch,
                          batch);
    if (exploding_tensor(*trace.dw))
      return make_symptom(SymptomCode::NS, Stage::Backward, layer, Quantity::DW, epoch,
                          batch);
    if (exploding_tensor(*trace.w))
      return make_symptom(SymptomCode::NS, Stage::Backward, layer, Quantity::W, epoch,
                          batch);
    if (unchanged_value(*trace.w, state.series(layer, Quantity::W), cfg))
      return make_symptom(SymptomCode::UCS, Stage::Backward, layer, Quantity::W, epoch,
                          batch);
    if (unchanged_value(*trace.dw, state.series(layer, Quantity::DW), cfg))
      return make_symptom(SymptomCode::UCS, Stage::Backward, layer, Quantity::DW, epoch,
                          batch);
  }
  return std::nullopt;
}

namespace {

void fill_stats(const Tensor& t, std::optional<double>& mean_out,
                std::optional<double>& var_out) {
  if (t.empty()) return;
  mean_out = mean(t);
  var_out = variance(t);
}

std::vector<LayerSummary> summarize_layers(const ModelSpec& spec,
                                           const std::vector<LayerTrace>& fwd,
                                           const std::vector<LayerTrace>& bwd) {
  std::vector<LayerSummary> out;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    LayerSummary s;
    s.index = static_cast<int>(i) + 1;
    s.kind = to_string(spec.layers[i].kind);
    if (spec.layers[i].kind == LayerKind::Activation)
      s.activation = to_string(spec.layers[i].activation);
    if (i < fwd.size()) {
      fill_stats(fwd[i].v1, s.v1_mean, s.v1_var);
      fill_stats(fwd[i].v2, s.v2_mean, s.v2_var);
      if (fwd[i].w) fill_stats(*fwd[i].w, s.w_mean, s.w_var);
    }
    if (i < bwd.size() && bwd[i].dw) fill_stats(*bwd[i].dw, s.dw_mean, s.dw_var);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

DiagnosisReport run_diagnosis(const ModelSpec& spec, const Tensor& x, const Tensor& y,
                              const MonitorConfig& cfg, bool explain) {
  auto started = std::chrono::steady_clock::now();

  Model model = build_model(spec, Rng(spec.seed));
  MonitorState state(cfg);

  TrainHooks hooks;
  hooks.after_forward = [&state](const std::vector<LayerTrace>& traces, const Tensor& by,
                                 int epoch, int batch) {
    return forward_hook(traces, by, state, epoch, batch);
  };
  hooks.after_metrics = [&state](const StepMetrics& metrics) {
    return metrics_hook(metrics, state);
  };
  hooks.after_backward = [&state](const std::vector<LayerTrace>& traces, int epoch,
                                  int batch) {
    return backward_hook(traces, state, epoch, batch);
  };

  TrainOutcome outcome = train(model, x, y, hooks);

  DiagnosisReport report;
  report.config = cfg;
  if (outcome.last_metrics.epoch != 0) {
    report.final_loss = outcome.last_metrics.loss;
    report.final_accuracy = outcome.last_metrics.accuracy;
  }
  report.layers = summarize_layers(spec, outcome.last_forward, outcome.last_backward);

  if (outcome.verdict) {
    report.verdict = outcome.verdict->code;
    report.symptom = outcome.verdict;

    DiagnosisContext ctx;
    ctx.inputs = x;
    ctx.labels = y;
    for (std::size_t i = 1; i <= model.layer_count(); ++i)
      if (model.has_weights(i))
        ctx.weights.emplace_back(static_cast<int>(i), model.layer_weights(i));
    for (const LayerTrace& trace : outcome.last_backward)
      if (trace.dw) ctx.dweights.emplace_back(trace.layer_index, *trace.dw);
    if (!outcome.last_forward.empty()) ctx.last_output = outcome.last_forward.back().v2;
    ctx.learning_rate = spec.learning_rate;
    ctx.model = spec;
    ctx.faulty = *outcome.verdict;

    MappingResult mapping = map_symptom(ctx, cfg);
    report.message = mapping.message;
    report.notes = std::move(mapping.notes);
    if (explain) report.checkers = std::move(mapping.checkers);
  }

  auto finished = std::chrono::steady_clock::now();
  report.duration_ms =
      std::chrono::duration<double, std::milli>(finished - started).count();
  return report;
}

}  // namespace traindx
