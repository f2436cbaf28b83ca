#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "traindx/detectors.hpp"
#include "traindx/model.hpp"
#include "traindx/symptoms.hpp"
#include "traindx/tensor.hpp"

namespace traindx {

/// Immutable snapshot handed to the mapper when a symptom fires: the data,
/// the current weights and most recent weight gradients (absent when no
/// backward pass has run yet), the last forward output and the model shape.
struct DiagnosisContext {
  Tensor inputs;
  Tensor labels;
  std::vector<std::pair<int, Tensor>> weights;    // (layer index, W)
  std::vector<std::pair<int, Tensor>> dweights;   // (layer index, dW); may be empty
  std::optional<Tensor> last_output;              // v2 of the final layer
  double learning_rate = 0.0;
  ModelSpec model;
  Symptom faulty;
};

/// One evaluated root-cause check, kept for explainability.
struct CheckerRecord {
  std::string name;
  bool fired = false;
  std::string detail;

  bool operator==(const CheckerRecord&) const = default;
};

/// C1: data outside the expected feature range. True when the data is
/// improper, i.e. min(x) < low or max(x) > high.
bool improper_data(const Tensor& x, const MonitorConfig& cfg);

/// C2: degenerate weight initialization. True when any layer's weight
/// variance is <= weight_var_min or >= weight_var_max. Returns the first
/// offending layer index when fired.
struct WeightVarianceResult {
  bool fired = false;
  std::optional<int> layer;
  double variance = 0.0;
};
WeightVarianceResult bad_weight_variance(const std::vector<std::pair<int, Tensor>>& weights,
                                         const MonitorConfig& cfg);

/// C3: learning-rate health. r is the mean over layers of
/// learning_rate * ||dW||_F / ||W||_F; layers with a zero-norm weight tensor
/// or no recorded gradient are skipped. LOW below learn_threshold /
/// learn_band_factor, HIGH above learn_threshold * learn_band_factor.
enum class LearnRate { Low, Ok, High };
struct TuneLearnResult {
  LearnRate verdict = LearnRate::Ok;
  double ratio = 0.0;
  bool evaluated = false;  // false when every layer was skipped
};
TuneLearnResult tune_learn(const std::vector<std::pair<int, Tensor>>& weights,
                           const std::vector<std::pair<int, Tensor>>& dweights,
                           double learning_rate, const MonitorConfig& cfg);

/// True when the loss and the final activation agree with the label shape:
/// single-column binary labels pair with sigmoid + binary cross-entropy,
/// one-hot labels with softmax + categorical cross-entropy, and regression
/// with a linear head + mse.
bool head_consistent(const ModelSpec& model, const Tensor& labels);

// Model-shape helpers used by the mapping rules. Indices are 1-based; 0
// means "none".
int last_parameterized_layer(const ModelSpec& model);
int parameterized_layer_count(const ModelSpec& model);
int final_activation_layer(const ModelSpec& model);
int first_hidden_logistic_layer(const ModelSpec& model);

/// An ordered root-cause candidate within a symptom's rule. Evaluation
/// appends a CheckerRecord; a non-empty result wins.
struct MappingCandidate {
  std::string name;
  std::function<std::optional<Message>(const DiagnosisContext&, const MonitorConfig&,
                                       std::vector<CheckerRecord>&)>
      eval;
};

struct MappingResult {
  Message message;
  std::vector<CheckerRecord> checkers;
  std::vector<std::string> notes;
};

/// The candidate list for a symptom, in rule order. Exposed so tests can
/// verify that any evaluation order still yields exactly one message.
std::vector<MappingCandidate> mapping_candidates(const DiagnosisContext& ctx);

/// The unconditional message used when no candidate fires.
Message mapping_fallback(const DiagnosisContext& ctx, const MonitorConfig& cfg,
                         std::vector<CheckerRecord>& checkers,
                         std::vector<std::string>& notes);

/// Walks the symptom's candidates and returns the first hit, or the
/// fallback. Total over every symptom except CM.
MappingResult map_symptom(const DiagnosisContext& ctx, const MonitorConfig& cfg);

}  // namespace traindx
