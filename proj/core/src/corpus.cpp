#include "traindx/corpus.hpp"

#include <ostream>
#include <sstream>

namespace traindx {

namespace {

LayerSpec dense(int units, int inputs = 0) {
  LayerSpec l;
  l.kind = LayerKind::Dense;
  l.units = units;
  l.inputs = inputs;
  return l;
}

LayerSpec activation(ActivationFn fn) {
  LayerSpec l;
  l.kind = LayerKind::Activation;
  l.activation = fn;
  return l;
}

LayerSpec dropout(double rate) {
  LayerSpec l;
  l.kind = LayerKind::Dropout;
  l.rate = rate;
  return l;
}

std::string describe(const DiagnosisReport& report) {
  std::ostringstream out;
  out << to_string(report.verdict);
  if (report.symptom) {
    out << " (" << to_string(report.symptom->stage);
    if (report.symptom->layer) out << ", layer " << *report.symptom->layer;
    out << ", epoch " << report.symptom->epoch << ", batch " << report.symptom->batch << ")";
  }
  if (report.message) out << " -> " << render_message(*report.message);
  return out.str();
}

}  // namespace

std::vector<CorpusCase> builtin_corpus() {
  std::vector<CorpusCase> cases;

  {
    // A single-unit softmax head emits a constant 1.0, so its gradient is
    // identically zero and the dense layer feeding it never learns.
    CorpusCase c;
    c.name = "collapsed_softmax_head";
    c.model.layers = {dense(50, 2), activation(ActivationFn::Relu), dropout(0.2),
                      dense(50),    activation(ActivationFn::Relu), dropout(0.2),
                      dense(1),     activation(ActivationFn::Softmax)};
    c.model.loss = LossFn::BinaryCrossentropy;
    c.model.clamp_crossentropy = true;
    c.model.optimizer = OptimizerKind::Rmsprop;
    c.model.learning_rate = 0.001;
    c.model.batch_size = 16;
    c.model.epochs = 2;
    c.model.seed = 7;
    c.data = {"blobs", 128, 0.08, true, 11, LabelKind::Binary};
    c.expect.symptom = SymptomCode::NS;
    c.expect.stage = Stage::Backward;
    c.expect.layer = 7;
    c.expect.message = "MSG2: Change the activation function at layer: 8";
    cases.push_back(std::move(c));
  }
  {
    // Raw pixel-scale inputs drive every sigmoid pre-activation far beyond
    // the saturation bounds on the first batch.
    CorpusCase c;
    c.name = "raw_pixel_range";
    c.model.layers = {dense(16, 2), activation(ActivationFn::Sigmoid), dense(1),
                      activation(ActivationFn::Sigmoid)};
    c.model.loss = LossFn::BinaryCrossentropy;
    c.model.optimizer = OptimizerKind::Sgd;
    c.model.learning_rate = 0.01;
    c.model.batch_size = 16;
    c.model.epochs = 1;
    c.model.seed = 3;
    c.data = {"blobs", 64, 0.08, false, 5, LabelKind::Binary};
    c.expect.symptom = SymptomCode::SAS;
    c.expect.stage = Stage::Forward;
    c.expect.layer = 2;
    c.expect.message = "MSG0: Improper Data";
    cases.push_back(std::move(c));
  }
  {
    // A negative bias pushes most relu pre-activations below zero, leaving
    // well over the dead-node ratio of the layer silent (but not all of it,
    // which would be an all-zero numerical error instead).
    CorpusCase c;
    c.name = "negative_bias_relu";
    LayerSpec first = dense(16, 2);
    first.bias_value = -0.5;
    c.model.layers = {first, activation(ActivationFn::Relu), dense(1),
                      activation(ActivationFn::Sigmoid)};
    c.model.loss = LossFn::BinaryCrossentropy;
    c.model.optimizer = OptimizerKind::Sgd;
    c.model.learning_rate = 0.01;
    c.model.batch_size = 16;
    c.model.epochs = 1;
    c.model.seed = 3;
    c.data = {"blobs", 64, 0.08, true, 9, LabelKind::Binary};
    c.expect.symptom = SymptomCode::DNS;
    c.expect.stage = Stage::Forward;
    c.expect.layer = 2;
    c.expect.message = "MSG2: Change the activation function at layer: 2";
    cases.push_back(std::move(c));
  }
  {
    // A tanh head emits negative values that binary {0, 1} labels can never
    // cover.
    CorpusCase c;
    c.name = "tanh_head_binary_labels";
    c.model.layers = {dense(8, 2), activation(ActivationFn::Relu), dense(1),
                      activation(ActivationFn::Tanh)};
    c.model.loss = LossFn::Mse;
    c.model.optimizer = OptimizerKind::Sgd;
    c.model.learning_rate = 0.01;
    c.model.batch_size = 16;
    c.model.epochs = 1;
    c.model.seed = 3;
    c.data = {"blobs", 64, 0.08, true, 13, LabelKind::Binary};
    c.expect.symptom = SymptomCode::ORS;
    c.expect.stage = Stage::Forward;
    c.expect.layer = 4;
    c.expect.message = "MSG2: Change the activation function at layer: 4";
    cases.push_back(std::move(c));
  }
  {
    // With a 1e-12 learning rate the weights, and therefore the layer
    // outputs under full-batch training, never move.
    CorpusCase c;
    c.name = "frozen_learning_rate";
    c.model.layers = {dense(8, 2), activation(ActivationFn::Relu), dense(1),
                      activation(ActivationFn::Sigmoid)};
    c.model.loss = LossFn::BinaryCrossentropy;
    c.model.optimizer = OptimizerKind::Sgd;
    c.model.learning_rate = 1e-12;
    c.model.batch_size = 64;  // full batch: one step per epoch
    c.model.epochs = 12;
    c.model.seed = 3;
    c.data = {"blobs", 64, 0.08, true, 17, LabelKind::Binary};
    c.expect.symptom = SymptomCode::UCS;
    c.expect.stage = Stage::Forward;
    c.expect.layer = 1;
    c.expect.message = "MSG3: Change the learning rate";
    cases.push_back(std::move(c));
  }
  {
    // Eleven stacked logistic layers throttle the gradient to nothing long
    // before it reaches the bottom of the net.
    CorpusCase c;
    c.name = "deep_logistic_stack";
    c.model.layers.push_back([] {
      LayerSpec l = dense(10, 2);
      l.init = InitKind::UniformSmall;
      return l;
    }());
    c.model.layers.push_back(activation(ActivationFn::Sigmoid));
    for (int i = 0; i < 9; ++i) {
      LayerSpec l = dense(10);
      l.init = InitKind::UniformSmall;
      c.model.layers.push_back(l);
      c.model.layers.push_back(activation(ActivationFn::Sigmoid));
    }
    LayerSpec head = dense(1);
    head.init = InitKind::UniformSmall;
    c.model.layers.push_back(head);
    c.model.layers.push_back(activation(ActivationFn::Sigmoid));
    c.model.loss = LossFn::BinaryCrossentropy;
    c.model.optimizer = OptimizerKind::Sgd;
    c.model.learning_rate = 0.01;
    c.model.batch_size = 63;
    c.model.epochs = 1;
    c.model.seed = 3;
    c.data = {"blobs", 63, 0.08, true, 19, LabelKind::Binary};
    c.expect.symptom = SymptomCode::VGS;
    c.expect.stage = Stage::Backward;
    c.expect.message = "MSG5: Change the layer number";
    cases.push_back(std::move(c));
  }

  return cases;
}

CaseResult run_case(const CorpusCase& c, const MonitorConfig& cfg) {
  CaseResult result;
  result.name = c.name;
  try {
    auto [x, y] = load_or_generate(c.data);
    DiagnosisReport report = run_diagnosis(c.model, x, y, cfg);
    result.duration_ms = report.duration_ms;

    std::ostringstream mismatch;
    const Expectation& e = c.expect;
    if (e.symptom && report.verdict != *e.symptom)
      mismatch << "expected symptom " << to_string(*e.symptom) << "; ";
    if (e.stage && (!report.symptom || report.symptom->stage != *e.stage))
      mismatch << "expected stage " << to_string(*e.stage) << "; ";
    if (e.layer && (!report.symptom || report.symptom->layer != e.layer))
      mismatch << "expected layer " << *e.layer << "; ";
    if (e.message_code && (!report.message || report.message->code != *e.message_code))
      mismatch << "expected " << to_string(*e.message_code) << "; ";
    if (e.message && (!report.message || render_message(*report.message) != *e.message))
      mismatch << "expected message '" << *e.message << "'; ";

    std::string bad = mismatch.str();
    result.pass = bad.empty();
    result.detail = result.pass ? describe(report) : bad + "got " + describe(report);
  } catch (const std::exception& ex) {
    result.pass = false;
    result.detail = std::string("error: ") + ex.what();
  }
  return result;
}

int run_corpus(const std::vector<CorpusCase>& cases, const MonitorConfig& cfg,
               std::ostream& out) {
  int failures = 0;
  for (const CorpusCase& c : cases) {
    CaseResult r = run_case(c, cfg);
    if (!r.pass) ++failures;
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.duration_ms << " ms): "
        << r.detail << "\n";
  }
  out << (cases.size() - failures) << "/" << cases.size() << " corpus cases passed\n";
  return failures;
}

}  // namespace traindx
