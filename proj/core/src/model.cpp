#include "traindx/model.hpp"

#include <cmath>
#include <stdexcept>

namespace traindx {

namespace {

constexpr double kCrossentropyClamp = 1e-12;

double clamp_prob(double p) {
  if (p < kCrossentropyClamp) return kCrossentropyClamp;
  if (p > 1.0 - kCrossentropyClamp) return 1.0 - kCrossentropyClamp;
  return p;
}

bool outside_clamp(double p) {
  return p < kCrossentropyClamp || p > 1.0 - kCrossentropyClamp;
}

/// v1 = x . W_weights + bias row, with W laid out (inputs + 1) x units.
Tensor dense_forward(const Tensor& x, const Tensor& w) {
  std::size_t in = w.rows() - 1;
  if (x.cols() != in) {
    throw ShapeError("dense_forward: input " + x.shape_str() + " does not match weights " +
                     w.shape_str());
  }
  Tensor out(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) = w(in, j);
    for (std::size_t k = 0; k < in; ++k) {
      double xik = x(i, k);
      for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) += xik * w(k, j);
    }
  }
  return out;
}

Tensor softmax_rows(const Tensor& v1) {
  Tensor out = v1;
  for (std::size_t i = 0; i < v1.rows(); ++i) {
    double m = v1(i, 0);
    for (std::size_t j = 1; j < v1.cols(); ++j) m = std::max(m, v1(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < v1.cols(); ++j) {
      double e = std::exp(v1(i, j) - m);
      out(i, j) = e;
      denom += e;
    }
    for (std::size_t j = 0; j < v1.cols(); ++j) out(i, j) /= denom;
  }
  return out;
}

Tensor activation_backward(const Tensor& g, const LayerTrace& trace) {
  switch (*trace.activation) {
    case ActivationFn::Relu: {
      Tensor out = g;
      for (std::size_t i = 0; i < out.size(); ++i)
        if (trace.v1.data()[i] <= 0.0) out.data()[i] = 0.0;
      return out;
    }
    case ActivationFn::Sigmoid: {
      Tensor out = g;
      for (std::size_t i = 0; i < out.size(); ++i) {
        double s = trace.v2.data()[i];
        out.data()[i] *= s * (1.0 - s);
      }
      return out;
    }
    case ActivationFn::Tanh: {
      Tensor out = g;
      for (std::size_t i = 0; i < out.size(); ++i) {
        double t = trace.v2.data()[i];
        out.data()[i] *= 1.0 - t * t;
      }
      return out;
    }
    case ActivationFn::Softmax: {
      // Full row Jacobian: d/dv1_i = p_i (g_i - sum_j g_j p_j).
      Tensor out = g;
      for (std::size_t i = 0; i < g.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) dot += g(i, j) * trace.v2(i, j);
        for (std::size_t j = 0; j < g.cols(); ++j)
          out(i, j) = trace.v2(i, j) * (g(i, j) - dot);
      }
      return out;
    }
    case ActivationFn::Linear:
      return g;
  }
  throw std::logic_error("activation_backward: unhandled activation");
}

}  // namespace

std::vector<int> validate_model_spec(const ModelSpec& spec) {
  if (spec.layers.empty()) throw std::invalid_argument("model: layers must be non-empty");
  if (spec.learning_rate <= 0.0)
    throw std::invalid_argument("model: learning_rate must be > 0");
  if (spec.batch_size < 1) throw std::invalid_argument("model: batch_size must be >= 1");
  if (spec.epochs < 1) throw std::invalid_argument("model: epochs must be >= 1");

  std::vector<int> dense_inputs(spec.layers.size(), 0);
  int width = 0;  // unknown until the first dense layer
  bool seen_dense = false;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& layer = spec.layers[i];
    std::string at = "layer " + std::to_string(i + 1);
    switch (layer.kind) {
      case LayerKind::Dense:
        if (layer.units < 1) throw std::invalid_argument(at + ": units must be >= 1");
        if (!seen_dense) {
          if (layer.inputs < 1)
            throw std::invalid_argument(at + ": first dense layer must declare inputs");
          width = layer.inputs;
        } else if (layer.inputs != 0 && layer.inputs != width) {
          throw std::invalid_argument(at + ": inputs " + std::to_string(layer.inputs) +
                                      " does not match previous width " +
                                      std::to_string(width));
        }
        dense_inputs[i] = width;
        width = layer.units;
        seen_dense = true;
        break;
      case LayerKind::Dropout:
        if (!(layer.rate >= 0.0 && layer.rate < 1.0))
          throw std::invalid_argument(at + ": rate in [0,1) required, got " +
                                      std::to_string(layer.rate));
        break;
      case LayerKind::Activation:
        break;
    }
  }
  if (!seen_dense) throw std::invalid_argument("model: at least one dense layer required");
  return dense_inputs;
}

Tensor& Model::layer_weights(std::size_t layer_index_1based) {
  return weights_.at(layer_index_1based - 1);
}

const Tensor& Model::layer_weights(std::size_t layer_index_1based) const {
  return weights_.at(layer_index_1based - 1);
}

bool Model::has_weights(std::size_t layer_index_1based) const {
  return !weights_.at(layer_index_1based - 1).empty();
}

Model build_model(const ModelSpec& spec, Rng rng) {
  std::vector<int> dense_inputs = validate_model_spec(spec);
  std::vector<Tensor> weights(spec.layers.size());
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& layer = spec.layers[i];
    if (layer.kind != LayerKind::Dense) continue;
    int in = dense_inputs[i];
    int units = layer.units;
    Tensor w(static_cast<std::size_t>(in) + 1, units);
    switch (layer.init) {
      case InitKind::GlorotUniform: {
        double limit = std::sqrt(6.0 / (in + units));
        for (int r = 0; r < in; ++r)
          for (int c = 0; c < units; ++c) w(r, c) = rng.uniform(-limit, limit);
        break;
      }
      case InitKind::UniformSmall: {
        for (int r = 0; r < in; ++r)
          for (int c = 0; c < units; ++c)
            w(r, c) = rng.uniform(-layer.init_scale, layer.init_scale);
        break;
      }
      case InitKind::Constant: {
        for (std::size_t k = 0; k < w.size(); ++k) w.data()[k] = layer.init_value;
        break;
      }
    }
    // Bias row: zero/explicit for random inits; constant init already filled
    // it and is only overridden when a bias was requested explicitly.
    if (layer.init != InitKind::Constant || layer.bias_value != 0.0) {
      for (int c = 0; c < units; ++c) w(in, c) = layer.bias_value;
    }
    weights[i] = std::move(w);
  }
  return Model(spec, std::move(weights), rng.split());
}

std::vector<LayerTrace> forward(Model& model, const Tensor& x, RunMode mode) {
  std::vector<LayerTrace> traces;
  traces.reserve(model.layer_count());
  Tensor current = x;
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    const LayerSpec& layer = model.spec().layers[i];
    LayerTrace trace;
    trace.layer_index = static_cast<int>(i) + 1;
    trace.kind = layer.kind;
    switch (layer.kind) {
      case LayerKind::Dense: {
        const Tensor& w = model.layer_weights(i + 1);
        trace.v1 = dense_forward(current, w);
        trace.v2 = trace.v1;
        trace.w = w;
        break;
      }
      case LayerKind::Activation: {
        trace.activation = layer.activation;
        trace.v1 = current;
        trace.v2 = apply_activation(current, layer.activation);
        break;
      }
      case LayerKind::Dropout: {
        trace.v1 = current;
        if (mode == RunMode::Training && layer.rate > 0.0) {
          // Inverted dropout: surviving activations are scaled by 1/(1-rate)
          // so inference needs no rescaling.
          Tensor mask(current.rows(), current.cols());
          double keep_scale = 1.0 / (1.0 - layer.rate);
          for (std::size_t k = 0; k < mask.size(); ++k)
            mask.data()[k] = model.dropout_rng().next_double() >= layer.rate ? keep_scale : 0.0;
          trace.v2 = hadamard(current, mask);
          trace.dropout_mask = std::move(mask);
        } else {
          trace.v2 = current;
        }
        break;
      }
    }
    current = trace.v2;
    traces.push_back(std::move(trace));
  }
  return traces;
}

Tensor apply_activation(const Tensor& v1, ActivationFn fn) {
  switch (fn) {
    case ActivationFn::Relu:
      return map(v1, [](double x) { return x > 0.0 ? x : 0.0; });
    case ActivationFn::Sigmoid:
      return map(v1, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    case ActivationFn::Tanh:
      return map(v1, [](double x) { return std::tanh(x); });
    case ActivationFn::Softmax:
      return softmax_rows(v1);
    case ActivationFn::Linear:
      return v1;
  }
  throw std::logic_error("apply_activation: unhandled activation");
}

double compute_loss(const Tensor& pred, const Tensor& y, LossFn loss,
                    bool clamp_crossentropy) {
  if (!pred.same_shape(y)) {
    throw ShapeError("compute_loss: prediction " + pred.shape_str() + " vs labels " +
                     y.shape_str());
  }
  double n = static_cast<double>(pred.size());
  switch (loss) {
    case LossFn::Mse: {
      double acc = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred.data()[i] - y.data()[i];
        acc += d * d;
      }
      return acc / n;
    }
    case LossFn::BinaryCrossentropy: {
      double acc = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        double p = pred.data()[i];
        if (clamp_crossentropy) p = clamp_prob(p);
        double t = y.data()[i];
        // Zero-weight terms contribute exactly zero; 0 * log(0) must not
        // poison a correct prediction with NaN.
        if (t != 0.0) acc -= t * std::log(p);
        if (t != 1.0) acc -= (1.0 - t) * std::log(1.0 - p);
      }
      return acc / n;
    }
    case LossFn::CategoricalCrossentropy: {
      double acc = 0.0;
      for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t j = 0; j < pred.cols(); ++j) {
          double t = y(i, j);
          if (t == 0.0) continue;
          double p = pred(i, j);
          if (clamp_crossentropy) p = clamp_prob(p);
          acc -= t * std::log(p);
        }
      }
      return acc / static_cast<double>(pred.rows());
    }
  }
  throw std::logic_error("compute_loss: unhandled loss");
}

std::optional<double> compute_accuracy(const Tensor& pred, const Tensor& y, Task task) {
  if (task == Task::Regression) return std::nullopt;
  if (!pred.same_shape(y)) {
    throw ShapeError("compute_accuracy: prediction " + pred.shape_str() + " vs labels " +
                     y.shape_str());
  }
  std::size_t correct = 0;
  if (pred.cols() == 1) {
    for (std::size_t i = 0; i < pred.rows(); ++i)
      if ((pred(i, 0) > 0.5) == (y(i, 0) > 0.5)) ++correct;
  } else {
    for (std::size_t i = 0; i < pred.rows(); ++i) {
      std::size_t pj = 0, yj = 0;
      for (std::size_t j = 1; j < pred.cols(); ++j) {
        if (pred(i, j) > pred(i, pj)) pj = j;
        if (y(i, j) > y(i, yj)) yj = j;
      }
      if (pj == yj) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(pred.rows());
}

Tensor loss_gradient(const Tensor& pred, const Tensor& y, LossFn loss,
                     bool clamp_crossentropy) {
  if (!pred.same_shape(y)) {
    throw ShapeError("loss_gradient: prediction " + pred.shape_str() + " vs labels " +
                     y.shape_str());
  }
  double n = static_cast<double>(pred.size());
  Tensor g(pred.rows(), pred.cols());
  switch (loss) {
    case LossFn::Mse: {
      for (std::size_t i = 0; i < pred.size(); ++i)
        g.data()[i] = 2.0 * (pred.data()[i] - y.data()[i]) / n;
      return g;
    }
    case LossFn::BinaryCrossentropy: {
      for (std::size_t i = 0; i < pred.size(); ++i) {
        double p = pred.data()[i];
        // Clamping is a hard clip, so its gradient vanishes outside the band.
        if (clamp_crossentropy && outside_clamp(p)) continue;
        double t = y.data()[i];
        double d = 0.0;
        if (t != 0.0) d -= t / p;
        if (t != 1.0) d += (1.0 - t) / (1.0 - p);
        g.data()[i] = d / n;
      }
      return g;
    }
    case LossFn::CategoricalCrossentropy: {
      for (std::size_t i = 0; i < pred.rows(); ++i) {
        for (std::size_t j = 0; j < pred.cols(); ++j) {
          double t = y(i, j);
          if (t == 0.0) continue;
          double p = pred(i, j);
          if (clamp_crossentropy && outside_clamp(p)) continue;
          g(i, j) = -t / (p * static_cast<double>(pred.rows()));
        }
      }
      return g;
    }
  }
  throw std::logic_error("loss_gradient: unhandled loss");
}

void backward(const Model& model, std::vector<LayerTrace>& traces, const Tensor& x,
              const Tensor& y) {
  if (traces.empty()) throw std::invalid_argument("backward: empty traces");
  Tensor g = loss_gradient(traces.back().v2, y, model.spec().loss,
                           model.spec().clamp_crossentropy);
  for (std::size_t idx = traces.size(); idx-- > 0;) {
    LayerTrace& trace = traces[idx];
    const Tensor& input = idx == 0 ? x : traces[idx - 1].v2;
    switch (trace.kind) {
      case LayerKind::Dense: {
        const Tensor& w = *trace.w;
        std::size_t in = w.rows() - 1;
        Tensor dw(w.rows(), w.cols());
        for (std::size_t r = 0; r < in; ++r) {
          for (std::size_t i = 0; i < input.rows(); ++i) {
            double xi = input(i, r);
            for (std::size_t c = 0; c < w.cols(); ++c) dw(r, c) += xi * g(i, c);
          }
        }
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t c = 0; c < g.cols(); ++c) dw(in, c) += g(i, c);
        Tensor v3(g.rows(), in);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t r = 0; r < in; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < w.cols(); ++c) acc += g(i, c) * w(r, c);
            v3(i, r) = acc;
          }
        trace.dw = std::move(dw);
        trace.v3 = v3;
        g = std::move(v3);
        break;
      }
      case LayerKind::Activation: {
        Tensor v3 = activation_backward(g, trace);
        trace.v3 = v3;
        g = std::move(v3);
        break;
      }
      case LayerKind::Dropout: {
        Tensor v3 = trace.dropout_mask ? hadamard(g, *trace.dropout_mask) : g;
        trace.v3 = v3;
        g = std::move(v3);
        break;
      }
    }
  }
}

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Activation: return "activation";
    case LayerKind::Dropout: return "dropout";
  }
  return "?";
}

const char* to_string(ActivationFn a) {
  switch (a) {
    case ActivationFn::Relu: return "relu";
    case ActivationFn::Sigmoid: return "sigmoid";
    case ActivationFn::Tanh: return "tanh";
    case ActivationFn::Softmax: return "softmax";
    case ActivationFn::Linear: return "linear";
  }
  return "?";
}

const char* to_string(LossFn l) {
  switch (l) {
    case LossFn::Mse: return "mse";
    case LossFn::BinaryCrossentropy: return "binary_crossentropy";
    case LossFn::CategoricalCrossentropy: return "categorical_crossentropy";
  }
  return "?";
}

const char* to_string(OptimizerKind o) {
  switch (o) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Rmsprop: return "rmsprop";
    case OptimizerKind::Adam: return "adam";
  }
  return "?";
}

const char* to_string(InitKind i) {
  switch (i) {
    case InitKind::GlorotUniform: return "glorot_uniform";
    case InitKind::UniformSmall: return "uniform_small";
    case InitKind::Constant: return "constant";
  }
  return "?";
}

const char* to_string(Task t) {
  switch (t) {
    case Task::Classification: return "classification";
    case Task::Regression: return "regression";
  }
  return "?";
}

}  // namespace traindx
