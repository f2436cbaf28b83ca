#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "traindx/detectors.hpp"
#include "traindx/diagnosis.hpp"
#include "traindx/model.hpp"
#include "traindx/symptoms.hpp"
#include "traindx/train.hpp"

namespace traindx {

/// Sliding histories for every monitored series, keyed by (layer, quantity),
/// plus the global loss/accuracy series. Owned by one diagnosis run.
class MonitorState {
public:
  explicit MonitorState(MonitorConfig cfg)
      : cfg_(cfg), loss_(cfg.history_window), accuracy_(cfg.history_window) {}

  const MonitorConfig& config() const { return cfg_; }

  History& series(int layer, Quantity q) {
    auto key = std::make_pair(layer, static_cast<int>(q));
    auto it = series_.find(key);
    if (it == series_.end())
      it = series_.emplace(key, History(cfg_.history_window)).first;
    return it->second;
  }

  History& loss_series() { return loss_; }
  History& accuracy_series() { return accuracy_; }

private:
  MonitorConfig cfg_;
  std::map<std::pair<int, int>, History> series_;
  History loss_;
  History accuracy_;
};

/// Forward-stage checks, walking layers in order: S1 on v2 then v1, S2 on v2
/// then v1, S3 on logistic pre-activations, S4 on relu outputs, and S5 on
/// the final layer's output against the batch labels. First hit wins.
std::optional<Symptom> forward_hook(const std::vector<LayerTrace>& traces,
                                    const Tensor& batch_y, MonitorState& state, int epoch,
                                    int batch);

/// Loss/accuracy checks in order: invalid loss, invalid accuracy, loss not
/// decreasing, accuracy not increasing.
std::optional<Symptom> metrics_hook(const StepMetrics& metrics, MonitorState& state);

/// Backward-stage checks on parameterized layers, walking from the last
/// layer to the first: S8 on dw, S1 on dw then w, S2 on w then dw.
std::optional<Symptom> backward_hook(const std::vector<LayerTrace>& traces,
                                     MonitorState& state, int epoch, int batch);

/// Per-layer statistics at the moment the run ended, for the report.
struct LayerSummary {
  int index = 0;
  std::string kind;
  std::optional<std::string> activation;
  std::optional<double> v1_mean, v1_var;
  std::optional<double> v2_mean, v2_var;
  std::optional<double> w_mean, w_var;
  std::optional<double> dw_mean, dw_var;

  bool operator==(const LayerSummary&) const = default;
};

struct DiagnosisReport {
  SymptomCode verdict = SymptomCode::CM;
  std::optional<Symptom> symptom;
  std::optional<Message> message;
  std::optional<double> final_loss;
  std::optional<double> final_accuracy;
  std::vector<LayerSummary> layers;
  std::vector<CheckerRecord> checkers;  // populated when explain was requested
  std::vector<std::string> notes;
  double duration_ms = 0.0;
  MonitorConfig config;

  bool operator==(const DiagnosisReport&) const = default;
};

/// Builds the model from the spec, trains it under the three hooks and maps
/// the first symptom (if any) to an actionable message. Returns a CM report
/// when the whole run stays clean.
DiagnosisReport run_diagnosis(const ModelSpec& spec, const Tensor& x, const Tensor& y,
                              const MonitorConfig& cfg = {}, bool explain = false);

}  // namespace traindx
