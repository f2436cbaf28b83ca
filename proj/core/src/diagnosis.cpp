#include "traindx/diagnosis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace traindx {

namespace {

std::string format_value(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

int fallback_layer(const DiagnosisContext& ctx) {
  if (ctx.faulty.layer) return *ctx.faulty.layer;
  return static_cast<int>(ctx.model.layers.size());
}

/// MSG2 targets the activation to change: the final activation layer when
/// one exists, otherwise the model's last layer.
int head_layer(const ModelSpec& model) {
  int act = final_activation_layer(model);
  return act != 0 ? act : static_cast<int>(model.layers.size());
}

MappingCandidate c1_candidate() {
  return {"C1", [](const DiagnosisContext& ctx, const MonitorConfig& cfg,
                   std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            bool fired = improper_data(ctx.inputs, cfg);
            recs.push_back({"C1", fired,
                            "data range [" + format_value(min_element(ctx.inputs)) + ", " +
                                format_value(max_element(ctx.inputs)) + "]"});
            if (fired) return Message{MessageCode::MSG0, std::nullopt};
            return std::nullopt;
          }};
}

MappingCandidate c2_candidate() {
  return {"C2", [](const DiagnosisContext& ctx, const MonitorConfig& cfg,
                   std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            WeightVarianceResult r = bad_weight_variance(ctx.weights, cfg);
            std::string detail = r.fired ? "layer " + std::to_string(*r.layer) +
                                               " variance " + format_value(r.variance)
                                         : "all layer variances in band";
            recs.push_back({"C2", r.fired, detail});
            if (r.fired) return Message{MessageCode::MSG4, r.layer};
            return std::nullopt;
          }};
}

enum class C3Mode { Low, High, Any };

MappingCandidate c3_candidate(C3Mode mode) {
  return {"C3", [mode](const DiagnosisContext& ctx, const MonitorConfig& cfg,
                       std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            TuneLearnResult r =
                tune_learn(ctx.weights, ctx.dweights, ctx.learning_rate, cfg);
            bool fired = false;
            if (r.evaluated) {
              switch (mode) {
                case C3Mode::Low: fired = r.verdict == LearnRate::Low; break;
                case C3Mode::High: fired = r.verdict == LearnRate::High; break;
                case C3Mode::Any: fired = r.verdict != LearnRate::Ok; break;
              }
            }
            std::string detail = r.evaluated ? "update/weight ratio " + format_value(r.ratio)
                                             : "no gradients recorded";
            recs.push_back({"C3", fired, detail});
            if (fired) return Message{MessageCode::MSG3, std::nullopt};
            return std::nullopt;
          }};
}

/// Last-layer output range against the labels; a mismatch points at the
/// final activation.
MappingCandidate output_range_candidate() {
  return {"output_range",
          [](const DiagnosisContext& ctx, const MonitorConfig&,
             std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            bool fired = ctx.last_output && out_of_range(*ctx.last_output, ctx.labels);
            recs.push_back({"output_range", fired,
                            ctx.last_output ? "final output range vs label range"
                                            : "no forward output recorded"});
            if (fired) return Message{MessageCode::MSG2, head_layer(ctx.model)};
            return std::nullopt;
          }};
}

MappingCandidate depth_candidate() {
  return {"depth", [](const DiagnosisContext& ctx, const MonitorConfig& cfg,
                      std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            int depth = parameterized_layer_count(ctx.model);
            bool fired = depth > cfg.depth_max_layers;
            recs.push_back({"depth", fired,
                            std::to_string(depth) + " parameterized layers (limit " +
                                std::to_string(cfg.depth_max_layers) + ")"});
            if (fired) return Message{MessageCode::MSG5, std::nullopt};
            return std::nullopt;
          }};
}

/// Loss/final-activation pairing against the label shape; a mismatch makes
/// the loss the actionable fix.
MappingCandidate head_pairing_candidate(MessageCode on_mismatch) {
  return {"head_pairing",
          [on_mismatch](const DiagnosisContext& ctx, const MonitorConfig&,
                        std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            bool consistent = head_consistent(ctx.model, ctx.labels);
            recs.push_back({"head_pairing", !consistent,
                            consistent ? "loss and final activation agree with labels"
                                       : "loss/final activation mismatch for labels"});
            if (!consistent) {
              if (on_mismatch == MessageCode::MSG2)
                return Message{MessageCode::MSG2, head_layer(ctx.model)};
              return Message{on_mismatch, std::nullopt};
            }
            return std::nullopt;
          }};
}

/// Hidden sigmoid/tanh layers throttle gradients; changing the first one is
/// the actionable fix for a vanishing signal.
MappingCandidate hidden_logistic_candidate() {
  return {"hidden_logistic",
          [](const DiagnosisContext& ctx, const MonitorConfig&,
             std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            int layer = first_hidden_logistic_layer(ctx.model);
            recs.push_back({"hidden_logistic", layer != 0,
                            layer != 0 ? "hidden logistic activation at layer " +
                                             std::to_string(layer)
                                       : "no hidden sigmoid/tanh layer"});
            if (layer != 0) return Message{MessageCode::MSG2, layer};
            return std::nullopt;
          }};
}

/// A numerical error in the gradients of the layer feeding the final
/// activation is the classic collapsed-head signature.
MappingCandidate last_parameterized_candidate() {
  return {"last_parameterized",
          [](const DiagnosisContext& ctx, const MonitorConfig&,
             std::vector<CheckerRecord>& recs) -> std::optional<Message> {
            int last_param = last_parameterized_layer(ctx.model);
            bool fired = ctx.faulty.layer && *ctx.faulty.layer == last_param;
            recs.push_back({"last_parameterized", fired,
                            fired ? "faulty layer feeds the final activation"
                                  : "faulty layer is not the last parameterized layer"});
            if (fired) return Message{MessageCode::MSG2, head_layer(ctx.model)};
            return std::nullopt;
          }};
}

}  // namespace

bool improper_data(const Tensor& x, const MonitorConfig& cfg) {
  return min_element(x) < cfg.data_range_low || max_element(x) > cfg.data_range_high;
}

WeightVarianceResult bad_weight_variance(const std::vector<std::pair<int, Tensor>>& weights,
                                         const MonitorConfig& cfg) {
  for (const auto& [layer, w] : weights) {
    if (w.empty()) continue;
    double var = variance(w);
    if (var <= cfg.weight_var_min || var >= cfg.weight_var_max) return {true, layer, var};
  }
  return {};
}

TuneLearnResult tune_learn(const std::vector<std::pair<int, Tensor>>& weights,
                           const std::vector<std::pair<int, Tensor>>& dweights,
                           double learning_rate, const MonitorConfig& cfg) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& [layer, w] : weights) {
    double wn = frobenius_norm(w);
    if (wn == 0.0) continue;  // degenerate layer, skipped
    for (const auto& [dlayer, dw] : dweights) {
      if (dlayer != layer) continue;
      sum += frobenius_norm(dw) / wn;
      ++counted;
      break;
    }
  }
  if (counted == 0) return {};
  TuneLearnResult result;
  result.evaluated = true;
  result.ratio = learning_rate * (sum / static_cast<double>(counted));
  if (result.ratio < cfg.learn_threshold / cfg.learn_band_factor)
    result.verdict = LearnRate::Low;
  else if (result.ratio > cfg.learn_threshold * cfg.learn_band_factor)
    result.verdict = LearnRate::High;
  return result;
}

bool head_consistent(const ModelSpec& model, const Tensor& labels) {
  int act_layer = final_activation_layer(model);
  ActivationFn head = act_layer != 0 ? model.layers[act_layer - 1].activation
                                     : ActivationFn::Linear;
  if (model.task == Task::Regression)
    return head == ActivationFn::Linear && model.loss == LossFn::Mse;
  if (labels.cols() == 1)
    return head == ActivationFn::Sigmoid && model.loss == LossFn::BinaryCrossentropy;
  return head == ActivationFn::Softmax && model.loss == LossFn::CategoricalCrossentropy;
}

int last_parameterized_layer(const ModelSpec& model) {
  int last = 0;
  for (std::size_t i = 0; i < model.layers.size(); ++i)
    if (model.layers[i].kind == LayerKind::Dense) last = static_cast<int>(i) + 1;
  return last;
}

int parameterized_layer_count(const ModelSpec& model) {
  int count = 0;
  for (const LayerSpec& layer : model.layers)
    if (layer.kind == LayerKind::Dense) ++count;
  return count;
}

int final_activation_layer(const ModelSpec& model) {
  int last = 0;
  for (std::size_t i = 0; i < model.layers.size(); ++i)
    if (model.layers[i].kind == LayerKind::Activation) last = static_cast<int>(i) + 1;
  return last;
}

int first_hidden_logistic_layer(const ModelSpec& model) {
  int final_act = final_activation_layer(model);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& layer = model.layers[i];
    int index = static_cast<int>(i) + 1;
    if (layer.kind != LayerKind::Activation || index == final_act) continue;
    if (layer.activation == ActivationFn::Sigmoid || layer.activation == ActivationFn::Tanh)
      return index;
  }
  return 0;
}

std::vector<MappingCandidate> mapping_candidates(const DiagnosisContext& ctx) {
  switch (ctx.faulty.code) {
    case SymptomCode::DNS:
      return {c1_candidate(), c2_candidate(), c3_candidate(C3Mode::Any)};
    case SymptomCode::SAS:
      return {c1_candidate(), c2_candidate(), c3_candidate(C3Mode::Any)};
    case SymptomCode::NS:
      if (ctx.faulty.stage == Stage::Backward) {
        return {last_parameterized_candidate(), c3_candidate(C3Mode::High), c2_candidate(),
                c1_candidate()};
      }
      return {c3_candidate(C3Mode::High), c2_candidate(), c1_candidate()};
    case SymptomCode::UCS:
      return {c3_candidate(C3Mode::Low), output_range_candidate(), c2_candidate()};
    case SymptomCode::LNDS:
    case SymptomCode::ANIS:
      return {c1_candidate(), c3_candidate(C3Mode::Any), depth_candidate(),
              head_pairing_candidate(MessageCode::MSG1)};
    case SymptomCode::VGS:
      return {depth_candidate(), c3_candidate(C3Mode::Low), hidden_logistic_candidate()};
    case SymptomCode::ILS:
      return {};
    case SymptomCode::IAS:
    case SymptomCode::ORS:
      return {head_pairing_candidate(MessageCode::MSG2)};
    case SymptomCode::CM:
      break;
  }
  throw std::invalid_argument("mapping_candidates: CM has no mapping");
}

Message mapping_fallback(const DiagnosisContext& ctx, const MonitorConfig&,
                         std::vector<CheckerRecord>&, std::vector<std::string>& notes) {
  switch (ctx.faulty.code) {
    case SymptomCode::DNS:
    case SymptomCode::SAS:
      return Message{MessageCode::MSG2, fallback_layer(ctx)};
    case SymptomCode::NS:
      if (ctx.faulty.stage == Stage::Backward) {
        notes.push_back(
            "every root-cause check passed; consider the batch size, which has "
            "no actionable message");
        return Message{MessageCode::MSG1, std::nullopt};
      }
      return Message{MessageCode::MSG2, fallback_layer(ctx)};
    case SymptomCode::UCS:
      return Message{MessageCode::MSG6, std::nullopt};
    case SymptomCode::LNDS:
    case SymptomCode::ANIS:
      return Message{MessageCode::MSG2, head_layer(ctx.model)};
    case SymptomCode::VGS:
      return Message{MessageCode::MSG4, std::nullopt};
    case SymptomCode::ILS:
    case SymptomCode::IAS:
    case SymptomCode::ORS:
      return Message{MessageCode::MSG1, std::nullopt};
    case SymptomCode::CM:
      break;
  }
  throw std::invalid_argument("mapping_fallback: CM has no mapping");
}

MappingResult map_symptom(const DiagnosisContext& ctx, const MonitorConfig& cfg) {
  if (ctx.faulty.code == SymptomCode::CM)
    throw std::invalid_argument("map_symptom: CM is not a faulty symptom");
  MappingResult result;
  for (const MappingCandidate& candidate : mapping_candidates(ctx)) {
    if (auto msg = candidate.eval(ctx, cfg, result.checkers)) {
      result.message = *msg;
      return result;
    }
  }
  result.message = mapping_fallback(ctx, cfg, result.checkers, result.notes);
  return result;
}

}  // namespace traindx
