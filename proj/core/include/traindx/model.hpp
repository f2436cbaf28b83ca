#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "traindx/rng.hpp"
#include "traindx/tensor.hpp"

namespace traindx {

enum class LayerKind { Dense, Activation, Dropout };
enum class ActivationFn { Relu, Sigmoid, Tanh, Softmax, Linear };
enum class LossFn { Mse, BinaryCrossentropy, CategoricalCrossentropy };
enum class OptimizerKind { Sgd, Rmsprop, Adam };
enum class InitKind { GlorotUniform, UniformSmall, Constant };
enum class Task { Classification, Regression };

/// One layer of the model description. Dense layers carry a unit count and,
/// for the first dense layer, the input width; later dense layers infer it.
/// Activation functions are standalone layers (a dense layer's own output is
/// its pre-activation), so layer indices count every entry here, 1-based.
struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  int units = 0;                 // dense only
  int inputs = 0;                // dense only; 0 = inferred from the previous layer
  ActivationFn activation = ActivationFn::Linear;  // activation layers only
  double rate = 0.0;             // dropout only, in [0, 1)
  InitKind init = InitKind::GlorotUniform;
  double init_value = 0.0;       // constant init
  double init_scale = 0.05;      // uniform_small init, weights in [-scale, scale)
  double bias_value = 0.0;       // initial bias for dense layers

  bool operator==(const LayerSpec&) const = default;
};

struct ModelSpec {
  std::vector<LayerSpec> layers;
  LossFn loss = LossFn::Mse;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  double learning_rate = 0.01;
  int batch_size = 32;
  int epochs = 1;
  std::uint64_t seed = 0;
  Task task = Task::Classification;
  /// Clamp cross-entropy inputs into [1e-12, 1 - 1e-12]. Off by default so
  /// that invalid losses surface as NaN/inf instead of being masked.
  bool clamp_crossentropy = false;

  bool operator==(const ModelSpec&) const = default;
};

/// Validates structural invariants; throws std::invalid_argument naming the
/// offending field otherwise. Returns the per-dense-layer input widths.
std::vector<int> validate_model_spec(const ModelSpec& spec);

/// Snapshot of one layer from a forward/backward pass. v1 is the layer's
/// linear (pre-activation) output, v2 its final output; for layers without a
/// nonlinearity the two are the same tensor. w/dw are present for dense
/// layers only and have identical shape: (inputs + 1) x units, the last row
/// holding the bias and its gradient.
struct LayerTrace {
  int layer_index = 0;  // 1-based
  LayerKind kind = LayerKind::Dense;
  std::optional<ActivationFn> activation;
  Tensor v1;
  Tensor v2;
  std::optional<Tensor> w;
  std::optional<Tensor> dw;
  std::optional<Tensor> v3;            // gradient passed to the previous layer
  std::optional<Tensor> dropout_mask;  // scaled keep-mask used in training mode
};

struct StepMetrics {
  int epoch = 0;  // 1-based
  int batch = 0;  // 1-based within the epoch
  double loss = 0.0;
  std::optional<double> accuracy;  // absent for regression

  bool operator==(const StepMetrics&) const = default;
};

enum class RunMode { Training, Inference };

/// A built model: the spec plus materialized weights. Weights for dense
/// layer i live at weights[i] as an (inputs + 1) x units tensor whose last
/// row is the bias; non-dense slots hold empty tensors.
class Model {
public:
  Model(ModelSpec spec, std::vector<Tensor> weights, Rng dropout_rng)
      : spec_(std::move(spec)), weights_(std::move(weights)), rng_(dropout_rng) {}

  const ModelSpec& spec() const { return spec_; }
  std::size_t layer_count() const { return spec_.layers.size(); }

  Tensor& layer_weights(std::size_t layer_index_1based);
  const Tensor& layer_weights(std::size_t layer_index_1based) const;
  bool has_weights(std::size_t layer_index_1based) const;

  Rng& dropout_rng() { return rng_; }

private:
  ModelSpec spec_;
  std::vector<Tensor> weights_;
  Rng rng_;
};

/// Materializes weights with the spec's initializers, drawing from rng in
/// layer order. Identical spec and seed give identical weights.
Model build_model(const ModelSpec& spec, Rng rng);

/// Runs the batch through every layer and records a trace per layer.
/// Dropout draws fresh masks in training mode and is the identity in
/// inference mode.
std::vector<LayerTrace> forward(Model& model, const Tensor& x,
                                RunMode mode = RunMode::Training);

/// Batch-mean loss. Cross-entropy terms with a zero label weight contribute
/// exactly zero; a zero probability under a nonzero label yields +/-inf.
double compute_loss(const Tensor& pred, const Tensor& y, LossFn loss,
                    bool clamp_crossentropy = false);

/// Fraction of correctly classified rows: argmax comparison for multi-column
/// outputs, 0.5-thresholding for single-column. Absent for regression.
std::optional<double> compute_accuracy(const Tensor& pred, const Tensor& y, Task task);

/// Gradient of the batch-mean loss with respect to the prediction tensor.
Tensor loss_gradient(const Tensor& pred, const Tensor& y, LossFn loss,
                     bool clamp_crossentropy = false);

/// Fills dw and v3 on the traces, walking layers from last to first. x is
/// the batch the traces were produced from; dw is the exact analytic
/// gradient of the batch-mean loss.
void backward(const Model& model, std::vector<LayerTrace>& traces, const Tensor& x,
              const Tensor& y);

// Activation helpers, exposed for tests.
Tensor apply_activation(const Tensor& v1, ActivationFn fn);

const char* to_string(LayerKind k);
const char* to_string(ActivationFn a);
const char* to_string(LossFn l);
const char* to_string(OptimizerKind o);
const char* to_string(InitKind i);
const char* to_string(Task t);

}  // namespace traindx
