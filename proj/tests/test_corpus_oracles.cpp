#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// Each built-in corpus fixture is constructed to exhibit one training fault.
// These tests verify the constructions themselves, from first principles:
// direct summation, finite differences and element counting, never the
// detectors under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "test_helpers.hpp"
#include "traindx/traindx.hpp"

using namespace traindx;

namespace {

const CorpusCase& fixture(const std::string& name) {
  static const std::vector<CorpusCase> corpus = builtin_corpus();
  for (const CorpusCase& c : corpus)
    if (c.name == name) return c;
  throw std::logic_error("no fixture named " + name);
}

struct FirstBatch {
  Model model;
  Tensor x;
  Tensor y;
};

/// The exact state the monitor sees on the first training step: the freshly
/// initialized model and the first batch of the generated data.
FirstBatch first_batch(const CorpusCase& c) {
  auto [x, y] = load_or_generate(c.data);
  std::size_t n = std::min<std::size_t>(c.model.batch_size, x.rows());
  return {build_model(c.model, Rng(c.model.seed)), x.slice_rows(0, n), y.slice_rows(0, n)};
}

/// Central-difference slope of the batch loss with respect to one weight
/// element. Inference mode keeps the pass deterministic under dropout.
double fd_slope(Model& model, const Tensor& x, const Tensor& y, std::size_t layer,
                std::size_t r, std::size_t c, double h = 1e-5) {
  double& w = model.layer_weights(layer)(r, c);
  const double saved = w;
  w = saved + h;
  double up = compute_loss(forward(model, x, RunMode::Inference).back().v2, y,
                           model.spec().loss, model.spec().clamp_crossentropy);
  w = saved - h;
  double down = compute_loss(forward(model, x, RunMode::Inference).back().v2, y,
                             model.spec().loss, model.spec().clamp_crossentropy);
  w = saved;
  return (up - down) / (2.0 * h);
}

}  // namespace

TEST_CASE("collapsed softmax head: the gradient is identically zero") {
  auto [model, x, y] = first_batch(fixture("collapsed_softmax_head"));
  std::vector<LayerTrace> traces = forward(model, x);
  REQUIRE(traces.size() == 8);

  // A softmax over a single logit is the constant 1.0, whatever the logit.
  const Tensor& head = traces.back().v2;
  REQUIRE(head.cols() == 1);
  for (double v : head.data()) CHECK(v == 1.0);

  // The clamped cross-entropy plateaus there, so the loss gradient vanishes.
  Tensor grad = loss_gradient(head, y, model.spec().loss, true);
  CHECK(all_zero(grad));

  // And so does every weight gradient below it.
  backward(model, traces, x, y);
  for (std::size_t layer : {7u, 4u, 1u}) {
    REQUIRE(traces[layer - 1].dw.has_value());
    CHECK(all_zero(*traces[layer - 1].dw));
  }

  // Finite differences agree: nudging the head weights cannot move the loss
  // because the softmax output never leaves 1.0.
  for (std::size_t r : {0u, 25u, 50u}) {
    CHECK(fd_slope(model, x, y, 7, r, 0) == 0.0);
  }
}

TEST_CASE("raw pixel range: unnormalized inputs saturate the first sigmoid") {
  const CorpusCase& c = fixture("raw_pixel_range");
  auto [model, x, y] = first_batch(c);

  // The data really is improper for a [-1, 1] pipeline.
  CHECK(max_element(x) > 1.0);
  CHECK(improper_data(x, MonitorConfig{}));

  // Recompute the first dense layer by direct summation.
  std::vector<LayerTrace> traces = forward(model, x);
  const Tensor& w = model.layer_weights(1);
  REQUIRE(w.rows() == 3);  // two inputs plus the bias row
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double acc = w(2, j);
      for (std::size_t k = 0; k < 2; ++k) acc += x(i, k) * w(k, j);
      CHECK(traces[0].v1(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
  }

  // More than half the sigmoid pre-activations sit beyond +/-5.
  const Tensor& pre = traces[1].v1;
  std::size_t beyond = 0;
  for (double v : pre.data())
    if (v >= 5.0 || v <= -5.0) ++beyond;
  CHECK(static_cast<double>(beyond) / pre.size() > 0.5);
}

TEST_CASE("negative bias relu: most, but not all, units are dead") {
  auto [model, x, y] = first_batch(fixture("negative_bias_relu"));
  std::vector<LayerTrace> traces = forward(model, x);

  const Tensor& out = traces[1].v2;  // relu output
  std::size_t dead = 0;
  for (double v : out.data())
    if (v == 0.0) ++dead;
  double fraction = static_cast<double>(dead) / out.size();
  CHECK(fraction > 0.7);
  CHECK(fraction < 1.0);  // an all-zero layer would be a numerical error, not a dead one

  // The weights themselves are healthy, so only the activation is to blame.
  double var = variance(model.layer_weights(1));
  CHECK(var > 1e-5);
  CHECK(var < 10.0);
  CHECK_FALSE(bad_weight_variance({{1, model.layer_weights(1)}}, MonitorConfig{}).fired);
}

TEST_CASE("tanh head: the output range undershoots binary labels") {
  const CorpusCase& c = fixture("tanh_head_binary_labels");
  auto [model, x, y] = first_batch(c);
  std::vector<LayerTrace> traces = forward(model, x);

  CHECK(min_element(y) == 0.0);
  CHECK(max_element(y) == 1.0);
  CHECK(min_element(traces.back().v2) < 0.0);  // tanh goes where no label lives

  // The (mse, tanh) head cannot represent {0, 1} targets.
  CHECK_FALSE(head_consistent(c.model, y));
}

TEST_CASE("frozen learning rate: one sgd step is a no-op at double precision") {
  const CorpusCase& c = fixture("frozen_learning_rate");
  auto [model, x, y] = first_batch(c);
  REQUIRE(x.rows() == 64);  // full batch: every step sees identical data

  std::vector<LayerTrace> traces = forward(model, x);
  backward(model, traces, x, y);

  std::vector<std::pair<int, Tensor>> weights, dweights;
  double hand_ratio_sum = 0.0;
  int layers = 0;
  for (const LayerTrace& t : traces) {
    if (!t.w || !t.dw) continue;
    weights.emplace_back(t.layer_index, *t.w);
    dweights.emplace_back(t.layer_index, *t.dw);
    hand_ratio_sum += frobenius_norm(*t.dw) / frobenius_norm(*t.w);
    ++layers;

    // The sgd update lr * dw is billionths of the smallest weight scale.
    double biggest_step = c.model.learning_rate * max_element(map(*t.dw, [](double v) {
                            return std::fabs(v);
                          }));
    CHECK(biggest_step < 1e-11);
  }
  REQUIRE(layers == 2);

  // By direct computation the learning-rate ratio is deep inside the LOW
  // band, and the checker agrees.
  MonitorConfig cfg;
  double hand_ratio = c.model.learning_rate * hand_ratio_sum / layers;
  CHECK(hand_ratio < cfg.learn_threshold / cfg.learn_band_factor);
  TuneLearnResult result = tune_learn(weights, dweights, c.model.learning_rate, cfg);
  CHECK(result.evaluated);
  CHECK(result.verdict == LearnRate::Low);
  CHECK(result.ratio == doctest::Approx(hand_ratio).epsilon(1e-12));

  // The inputs are normalized, so the improper-data check stays silent and
  // the mapper reaches the learning-rate rule.
  CHECK_FALSE(improper_data(x, cfg));
}

TEST_CASE("deep logistic stack: the gradient decays to nothing on the way down") {
  const CorpusCase& c = fixture("deep_logistic_stack");
  CHECK(parameterized_layer_count(c.model) == 11);
  CHECK(parameterized_layer_count(c.model) > MonitorConfig{}.depth_max_layers);

  auto [model, x, y] = first_batch(c);
  std::vector<LayerTrace> traces = forward(model, x);
  backward(model, traces, x, y);

  // Walking down from the head, mean |dw| shrinks strictly at every dense
  // layer, ending some ten orders of magnitude below the vanishing threshold.
  double above = mean_abs(*traces[20].dw);
  for (int layer = 19; layer >= 1; layer -= 2) {
    double here = mean_abs(*traces[layer - 1].dw);
    CHECK(here < above);
    above = here;
  }
  CHECK(mean_abs(*traces[0].dw) < 1e-12);

  // Layer 17 is still above the 1e-7 threshold, layer 15 is the first one
  // below it: exactly where a backward walk from the head lands.
  CHECK(mean_abs(*traces[16].dw) >= 1e-7);
  const Tensor& dw15 = *traces[14].dw;
  CHECK(mean_abs(dw15) > 0.0);
  CHECK(mean_abs(dw15) < 1e-7);

  // Finite differences confirm the analytic gradient at layer 15, where the
  // signal (about 2e-8) still clears the fd noise floor of roughly 4e-12.
  double fd_abs_sum = 0.0;
  for (std::size_t r = 0; r < dw15.rows(); ++r) {
    for (std::size_t col = 0; col < dw15.cols(); ++col) {
      double fd = fd_slope(model, x, y, 15, r, col);
      fd_abs_sum += std::fabs(fd);
      CHECK(std::fabs(fd - dw15(r, col)) < 1e-9);
    }
  }
  double fd_mean_abs = fd_abs_sum / dw15.size();
  CHECK(fd_mean_abs > 0.0);
  CHECK(fd_mean_abs < 1e-7);

  // At the bottom the true slope is around 1e-18: perturbing a first-layer
  // weight by 1e-2 moves the loss by less than one ulp, so the measured
  // slope is exactly zero. The bottom of this net cannot learn in doubles.
  for (std::size_t r : {0u, 1u, 2u}) {
    CHECK(fd_slope(model, x, y, 1, r, 0, 1e-2) == 0.0);
  }
}
