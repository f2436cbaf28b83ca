// Acceptance gate: one pass/fail line per shipping criterion, nonzero exit
// if any fails. argv[1] is the path to the traindx CLI binary; the two
// CLI-level criteria fail without it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../test_helpers.hpp"
#include "traindx/traindx.hpp"

using namespace traindx;
using namespace traindx::testing;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("traindx_accept_" + name)).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string strip_duration(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"duration_ms\"") == std::string::npos) out << line << "\n";
  return out.str();
}

// --- criterion 1: reference-net reproduction ---------------------------

bool reference_net(std::string& detail) {
  auto start = Clock::now();
  auto [x, y] = load_or_generate(collapsed_softmax_data());

  std::vector<DiagnosisReport> runs;
  for (int i = 0; i < 5; ++i) {
    runs.push_back(run_diagnosis(collapsed_softmax_spec(), x, y));
    runs.back().duration_ms = 0.0;
  }
  double elapsed = seconds_since(start);

  const DiagnosisReport& r = runs.front();
  if (r.verdict != SymptomCode::NS || !r.symptom || r.symptom->stage != Stage::Backward ||
      r.symptom->layer != 7) {
    detail = "expected NS in BW at layer 7, got " + render_report(r);
    return false;
  }
  if (!r.message || r.message->code != MessageCode::MSG2 || r.message->target_layer != 8) {
    detail = "expected MSG2 at layer 8";
    return false;
  }
  if (render_message(*r.message) != "MSG2: Change the activation function at layer: 8") {
    detail = "unexpected message text: " + render_message(*r.message);
    return false;
  }
  for (int i = 1; i < 5; ++i) {
    if (!(runs[i] == r)) {
      detail = "run " + std::to_string(i + 1) + " differs from run 1";
      return false;
    }
  }
  if (elapsed >= 60.0) {
    detail = "took " + std::to_string(elapsed) + " s (limit 60)";
    return false;
  }
  std::ostringstream out;
  out << "NS/BW/layer 7 -> MSG2 at layer 8, 5 identical runs in " << elapsed << " s";
  detail = out.str();
  return true;
}

// --- criterion 2: gradient oracle -------------------------------------------

double fd_slope(Model& model, const Tensor& x, const Tensor& y, std::size_t layer,
                std::size_t r, std::size_t c) {
  constexpr double h = 1e-5;
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

bool gradient_oracle(std::string& detail) {
  auto start = Clock::now();
  struct Head {
    LossFn loss;
    ActivationFn fn;
    int units;
  };
  const std::vector<Head> heads = {
      {LossFn::Mse, ActivationFn::Linear, 2},
      {LossFn::Mse, ActivationFn::Tanh, 2},
      {LossFn::Mse, ActivationFn::Sigmoid, 2},
      {LossFn::Mse, ActivationFn::Relu, 2},
      {LossFn::Mse, ActivationFn::Softmax, 3},
      {LossFn::BinaryCrossentropy, ActivationFn::Sigmoid, 1},
      {LossFn::BinaryCrossentropy, ActivationFn::Softmax, 3},
      {LossFn::CategoricalCrossentropy, ActivationFn::Softmax, 3},
      {LossFn::CategoricalCrossentropy, ActivationFn::Sigmoid, 3},
  };
  using Hidden = std::vector<std::pair<int, ActivationFn>>;
  const std::vector<Hidden> all_hiddens = {{},
                                           {{5, ActivationFn::Relu}},
                                           {{6, ActivationFn::Sigmoid}},
                                           {{4, ActivationFn::Tanh}},
                                           {{5, ActivationFn::Relu}, {4, ActivationFn::Sigmoid}}};

  int models_checked = 0;
  double worst = 0.0;
  std::uint64_t seed = 100;
  for (const Head& head : heads) {
    // Every hidden sweep for the mse heads, a shorter one for the rest.
    std::vector<Hidden> hiddens =
        head.loss == LossFn::Mse ? all_hiddens
                                 : std::vector<Hidden>{all_hiddens[1], all_hiddens[4]};
    for (const Hidden& hidden : hiddens) {
      ModelSpec spec;
      int inputs = 3;
      for (auto [units, fn] : hidden) {
        spec.layers.push_back(dense(units, spec.layers.empty() ? inputs : 0));
        spec.layers.push_back(act(fn));
      }
      spec.layers.push_back(dense(head.units, spec.layers.empty() ? inputs : 0));
      spec.layers.push_back(act(head.fn));
      spec.loss = head.loss;
      spec.seed = ++seed;

      Rng data_rng(seed * 31 + 1);
      Tensor x(4, inputs);
      for (double& v : x.data()) v = data_rng.uniform(-1.0, 1.0);
      Tensor y(4, head.units);
      if (head.loss == LossFn::Mse) {
        for (double& v : y.data()) v = data_rng.uniform(-0.5, 0.5);
      } else if (head.units == 1) {
        for (std::size_t i = 0; i < y.rows(); ++i) y(i, 0) = i % 2 ? 1.0 : 0.0;
      } else {
        for (std::size_t i = 0; i < y.rows(); ++i)
          y(i, i % static_cast<std::size_t>(head.units)) = 1.0;
      }

      Model model = build_model(spec, Rng(spec.seed));
      std::vector<LayerTrace> traces = forward(model, x, RunMode::Inference);
      backward(model, traces, x, y);

      for (const LayerTrace& t : traces) {
        if (!t.dw) continue;
        for (std::size_t r = 0; r < t.dw->rows(); ++r) {
          for (std::size_t c = 0; c < t.dw->cols(); ++c) {
            double analytic = (*t.dw)(r, c);
            double fd = fd_slope(model, x, y, t.layer_index, r, c);
            double denom = std::max({std::fabs(fd), std::fabs(analytic), 1e-8});
            double rel = std::fabs(fd - analytic) / denom;
            worst = std::max(worst, rel);
            if (rel > 1e-4) {
              std::ostringstream out;
              out << "model " << models_checked + 1 << " layer " << t.layer_index << " ("
                  << r << "," << c << "): analytic " << analytic << " vs fd " << fd
                  << ", rel " << rel;
              detail = out.str();
              return false;
            }
          }
        }
      }
      ++models_checked;
    }
  }
  double elapsed = seconds_since(start);
  if (models_checked < 20) {
    detail = "only " + std::to_string(models_checked) + " models checked";
    return false;
  }
  if (elapsed >= 10.0) {
    detail = "took " + std::to_string(elapsed) + " s (limit 10)";
    return false;
  }
  std::ostringstream out;
  out << models_checked << " models, worst relative error " << worst << ", " << elapsed
      << " s";
  detail = out.str();
  return true;
}

// --- criterion 3: detector unit suite ----------------------------------------

/// Tensor with `hot` elements at `hot_value` and the rest at `base`.
Tensor mix(std::size_t n, std::size_t hot, double hot_value, double base) {
  Tensor t(1, n);
  for (std::size_t i = 0; i < n; ++i) t(0, i) = i < hot ? hot_value : base;
  return t;
}

bool detector_suite(std::string& detail) {
  MonitorConfig cfg;
  int checks = 0;
  auto expect = [&](bool condition, const char* what) {
    ++checks;
    if (!condition && detail.empty()) detail = what;
    return condition;
  };
  bool ok = true;

  // S1: NaN, inf and all-zero fire; a healthy tensor does not.
  ok &= expect(exploding_tensor(mix(4, 1, std::nan(""), 1.0)), "S1 missed NaN");
  ok &= expect(exploding_tensor(mix(4, 1, HUGE_VAL, 1.0)), "S1 missed inf");
  ok &= expect(exploding_tensor(Tensor::zeros(2, 2)), "S1 missed all-zero");
  ok &= expect(!exploding_tensor(mix(4, 2, 0.5, -0.5)), "S1 false positive");

  // S2: a constant series fires at the first evaluation step; a moving one
  // does not.
  {
    History constant(5), moving(5);
    Tensor fixed = Tensor::full(1, 3, 2.0);
    for (int step = 1; step <= 5; ++step) {
      ok &= expect(!unchanged_value(fixed, constant, cfg), "S2 fired before the window");
      ok &= expect(!unchanged_value(Tensor::full(1, 3, 2.0 + step), moving, cfg),
                   "S2 fired on a moving series");
    }
    ok &= expect(unchanged_value(fixed, constant, cfg), "S2 missed a constant series");
    ok &= expect(!unchanged_value(Tensor::full(1, 3, 9.0), moving, cfg),
                 "S2 fired on a moving series at evaluation");
  }

  // S3: fraction at the bounds must strictly exceed 0.5, logistic layers only.
  ok &= expect(!saturated_activation(mix(16, 8, 5.0, 0.0), ActivationFn::Sigmoid, cfg),
               "S3 fired at ratio exactly 0.5");
  ok &= expect(saturated_activation(mix(16, 9, 5.0, 0.0), ActivationFn::Sigmoid, cfg),
               "S3 missed ratio 9/16");
  ok &= expect(saturated_activation(mix(16, 9, -5.0, 0.0), ActivationFn::Tanh, cfg),
               "S3 missed the lower bound on tanh");
  ok &= expect(!saturated_activation(mix(16, 16, 5.0, 5.0), ActivationFn::Relu, cfg),
               "S3 fired on relu");

  // S4: dead fraction must strictly exceed 0.7, relu layers only.
  ok &= expect(!dead_node(mix(10, 7, 0.0, 1.0), ActivationFn::Relu, cfg),
               "S4 fired at fraction exactly 0.7");
  ok &= expect(dead_node(mix(10, 8, 0.0, 1.0), ActivationFn::Relu, cfg),
               "S4 missed fraction 0.8");
  ok &= expect(!dead_node(mix(10, 10, 0.0, 0.0), ActivationFn::Sigmoid, cfg),
               "S4 fired on sigmoid");

  // S5: the output interval must sit inside the label interval, inclusively.
  Tensor labels01 = mix(4, 2, 1.0, 0.0);
  ok &= expect(out_of_range(mix(3, 1, 1.5, 0.5), labels01), "S5 missed 1.5 over [0,1]");
  ok &= expect(out_of_range(mix(3, 1, -0.5, 0.5), labels01), "S5 missed -0.5 under [0,1]");
  ok &= expect(!out_of_range(mix(3, 1, 1.0, 0.0), labels01), "S5 fired on inclusive bounds");

  // S6: loss >= window mean at an evaluation step.
  {
    History flat(5), improving(5);
    for (int step = 0; step < 5; ++step) {
      ok &= expect(!loss_not_decreasing(3.0, flat, cfg), "S6 fired before the window");
      ok &= expect(!loss_not_decreasing(3.0 - 0.1 * step, improving, cfg),
                   "S6 fired on an improving series");
    }
    ok &= expect(loss_not_decreasing(3.0, flat, cfg), "S6 missed a flat loss");
    ok &= expect(!loss_not_decreasing(2.0, improving, cfg),
                 "S6 fired on a decreasing loss at evaluation");
  }

  // S7: accuracy <= window mean at an evaluation step.
  {
    History flat(5), improving(5);
    for (int step = 0; step < 5; ++step) {
      ok &= expect(!accuracy_not_increasing(0.5, flat, cfg), "S7 fired before the window");
      ok &= expect(!accuracy_not_increasing(0.1 + 0.05 * step, improving, cfg),
                   "S7 fired on an improving series");
    }
    ok &= expect(accuracy_not_increasing(0.5, flat, cfg), "S7 missed a flat accuracy");
    ok &= expect(!accuracy_not_increasing(0.9, improving, cfg),
                 "S7 fired on an increasing accuracy at evaluation");
  }

  // S8: positive but sub-threshold mean |dw| fires; zero and healthy do not.
  ok &= expect(vanishing_gradient(Tensor::full(2, 2, 1e-8), cfg), "S8 missed 1e-8");
  ok &= expect(!vanishing_gradient(Tensor::zeros(2, 2), cfg), "S8 fired on exact zero");
  ok &= expect(!vanishing_gradient(Tensor::full(2, 2, 1e-7), cfg),
               "S8 fired at the threshold");
  ok &= expect(!vanishing_gradient(Tensor::full(2, 2, 1e-3), cfg), "S8 fired on healthy");

  if (ok) detail = std::to_string(checks) + " fixtures, boundaries included";
  return ok;
}

// --- criterion 4: window semantics --------------------------------------------

bool window_semantics(std::string& detail) {
  MonitorConfig cfg;
  Rng rng(42);
  for (int stream = 0; stream < 20; ++stream) {
    History hv(5), hl(5), ha(5);
    for (int step = 1; step <= 5; ++step) {
      Tensor t = Tensor::full(1, 2, rng.uniform(-10.0, 10.0));
      if (unchanged_value(t, hv, cfg) || loss_not_decreasing(rng.uniform(0.0, 5.0), hl, cfg) ||
          accuracy_not_increasing(rng.uniform(0.0, 1.0), ha, cfg)) {
        detail = "a windowed detector fired at step " + std::to_string(step) +
                 " of stream " + std::to_string(stream + 1);
        return false;
      }
    }
  }

  History hv(5), hl(5), ha(5);
  for (int step = 1; step <= 5; ++step) {
    unchanged_value(Tensor::full(1, 2, 1.5), hv, cfg);
    loss_not_decreasing(0.7, hl, cfg);
    accuracy_not_increasing(0.5, ha, cfg);
  }
  if (!unchanged_value(Tensor::full(1, 2, 1.5), hv, cfg) ||
      !loss_not_decreasing(0.7, hl, cfg) || !accuracy_not_increasing(0.5, ha, cfg)) {
    detail = "a constant stream did not fire at step 6";
    return false;
  }
  detail = "no firings in steps 1-5 over 20 random streams; constants fire at step 6";
  return true;
}

// --- criterion 5: correct-model suite -----------------------------------------

bool correct_models(std::string& detail) {
  struct Config {
    const char* source;
    double lr;
    std::uint64_t model_seed;
    std::uint64_t data_seed;
  };
  const std::vector<Config> configs = {
      {"blobs", 0.01, 2, 1},  {"blobs", 0.01, 5, 4},  {"circles", 0.1, 2, 1},
      {"circles", 0.1, 2, 4}, {"xor", 0.01, 1, 1},    {"xor", 0.01, 3, 4},
  };
  std::ostringstream summary;
  for (const Config& c : configs) {
    ModelSpec spec;
    spec.layers = {dense(8, 2), act(ActivationFn::Relu), dense(1),
                   act(ActivationFn::Sigmoid)};
    spec.loss = LossFn::BinaryCrossentropy;
    spec.optimizer = OptimizerKind::Adam;
    spec.learning_rate = c.lr;
    spec.batch_size = 64;
    spec.epochs = 10;
    spec.seed = c.model_seed;
    auto [x, y] =
        load_or_generate(DatasetSpec{c.source, 64, 0.05, true, c.data_seed, LabelKind::Binary});
    DiagnosisReport report = run_diagnosis(spec, x, y);
    if (report.verdict != SymptomCode::CM || report.symptom || report.message) {
      detail = std::string(c.source) + " seeds (" + std::to_string(c.model_seed) + "," +
               std::to_string(c.data_seed) + "): expected a clean CM run, got " +
               to_string(report.verdict);
      return false;
    }
    if (!report.final_accuracy || *report.final_accuracy < 0.90) {
      detail = std::string(c.source) + ": final accuracy " +
               (report.final_accuracy ? std::to_string(*report.final_accuracy) : "absent") +
               " < 0.90";
      return false;
    }
    summary << c.source << " " << *report.final_accuracy << "  ";
  }
  detail = "6/6 clean runs (need 5): " + summary.str();
  return true;
}

// --- criterion 6: mapper totality ---------------------------------------------

bool mapper_totality(std::string& detail) {
  ModelSpec spec = collapsed_softmax_spec();
  Model model = build_model(spec, Rng(spec.seed));
  auto [x, y] = load_or_generate(collapsed_softmax_data());

  DiagnosisContext rich;
  rich.inputs = x.slice_rows(0, 16);
  rich.labels = y.slice_rows(0, 16);
  for (std::size_t i = 1; i <= spec.layers.size(); ++i) {
    if (!model.has_weights(i)) continue;
    rich.weights.emplace_back(static_cast<int>(i), model.layer_weights(i));
    rich.dweights.emplace_back(static_cast<int>(i),
                               scale(model.layer_weights(i), 1e-3));
  }
  rich.last_output = Tensor::full(16, 1, 1.0);
  rich.learning_rate = spec.learning_rate;
  rich.model = spec;

  DiagnosisContext sparse = rich;  // as seen before any backward pass
  sparse.dweights.clear();
  sparse.last_output.reset();

  DiagnosisContext degenerate = rich;  // improper data, collapsed weights
  degenerate.inputs = Tensor::full(4, 2, 200.0);
  degenerate.weights = {{1, Tensor::full(3, 4, 0.5)}};
  degenerate.dweights = {{1, Tensor::full(3, 4, 0.1)}};

  const std::vector<SymptomCode> codes = {
      SymptomCode::NS,   SymptomCode::UCS,  SymptomCode::SAS, SymptomCode::DNS,
      SymptomCode::ORS,  SymptomCode::LNDS, SymptomCode::ANIS, SymptomCode::VGS,
      SymptomCode::ILS,  SymptomCode::IAS};
  const std::vector<Stage> stages = {Stage::Forward, Stage::Backward, Stage::Global};
  const std::vector<std::optional<int>> layers = {std::nullopt, 1, 2, 7, 8};

  int cases = 0;
  for (const DiagnosisContext* base : {&rich, &sparse, &degenerate}) {
    for (SymptomCode code : codes) {
      for (Stage stage : stages) {
        for (const auto& layer : layers) {
          DiagnosisContext ctx = *base;
          ctx.faulty = Symptom{code, stage, layer, std::nullopt, 1, 1};
          MappingResult result;
          try {
            result = map_symptom(ctx, MonitorConfig{});
          } catch (const std::exception& e) {
            detail = std::string("map_symptom threw for ") + to_string(code) + "/" +
                     to_string(stage) + ": " + e.what();
            return false;
          }
          int msg = static_cast<int>(result.message.code);
          if (msg < 0 || msg > 6) {
            detail = std::string("no valid message for ") + to_string(code);
            return false;
          }
          ++cases;
        }
      }
    }
  }

  // The reference decision path: a numerical error in the backward stage at
  // the last parameterized layer blames the final activation.
  DiagnosisContext table1 = rich;
  table1.faulty = Symptom{SymptomCode::NS, Stage::Backward,
                          last_parameterized_layer(spec), Quantity::DW, 1, 1};
  MappingResult result = map_symptom(table1, MonitorConfig{});
  if (result.message.code != MessageCode::MSG2 ||
      result.message.target_layer != final_activation_layer(spec)) {
    detail = "NS/BW at the last parameterized layer mapped to " +
             render_message(result.message);
    return false;
  }
  detail = std::to_string(cases) + " enumerated cases, each with exactly one message; "
           "NS/BW resolves to MSG2 at layer " +
           std::to_string(final_activation_layer(spec));
  return true;
}

// --- criterion 7: built-in corpus through the CLI ------------------------------

bool corpus_cli(const std::string& cli, std::string& detail) {
  if (cli.empty()) {
    detail = "CLI path not provided";
    return false;
  }
  auto start = Clock::now();
  std::string out_path = temp_path("corpus.txt");
  int rc = std::system((cli + " corpus > " + out_path + " 2>&1").c_str());
  double elapsed = seconds_since(start);
  std::string output = read_text_file(out_path);
  std::remove(out_path.c_str());
  if (rc != 0) {
    detail = "exit status " + std::to_string(rc) + "; output:\n" + output;
    return false;
  }
  if (output.find("6/6 corpus cases passed") == std::string::npos) {
    detail = "unexpected corpus output:\n" + output;
    return false;
  }
  if (elapsed >= 180.0) {
    detail = "took " + std::to_string(elapsed) + " s (limit 180)";
    return false;
  }
  std::ostringstream msg;
  msg << "6/6 cases, " << elapsed << " s";
  detail = msg.str();
  return true;
}

// --- criterion 8: report determinism -------------------------------------------

bool determinism(const std::string& cli, std::string& detail) {
  // Library level: identical runs render identically.
  auto [x, y] = load_or_generate(collapsed_softmax_data());
  DiagnosisReport a = run_diagnosis(collapsed_softmax_spec(), x, y);
  DiagnosisReport b = run_diagnosis(collapsed_softmax_spec(), x, y);
  a.duration_ms = b.duration_ms = 0.0;
  if (render_report(a) != render_report(b)) {
    detail = "library-level reports differ";
    return false;
  }

  if (cli.empty()) {
    detail = "CLI path not provided";
    return false;
  }
  std::string model_path = temp_path("model.json");
  std::string data_path = temp_path("data.json");
  std::string out1 = temp_path("report1.json");
  std::string out2 = temp_path("report2.json");
  write_file(model_path, R"({
    "layers": [
      {"kind": "dense", "units": 50, "inputs": 2},
      {"kind": "activation", "activation": "relu"},
      {"kind": "dropout", "rate": 0.2},
      {"kind": "dense", "units": 50},
      {"kind": "activation", "activation": "relu"},
      {"kind": "dropout", "rate": 0.2},
      {"kind": "dense", "units": 1},
      {"kind": "activation", "activation": "softmax"}
    ],
    "loss": "binary_crossentropy",
    "optimizer": "rmsprop",
    "learning_rate": 0.001,
    "batch_size": 16,
    "epochs": 2,
    "seed": 7,
    "clamp_crossentropy": true
  })");
  write_file(data_path, R"({"source": "blobs", "samples": 128, "noise": 0.08, "seed": 11})");

  std::string base = cli + " diagnose --model " + model_path + " --data " + data_path;
  int rc1 = std::system((base + " --out " + out1 + " > /dev/null 2>&1").c_str());
  int rc2 = std::system((base + " --out " + out2 + " > /dev/null 2>&1").c_str());
  std::string first = rc1 != -1 ? read_text_file(out1) : "";
  std::string second = rc2 != -1 ? read_text_file(out2) : "";
  for (const std::string& p : {model_path, data_path, out1, out2}) std::remove(p.c_str());

  if (first.empty() || second.empty()) {
    detail = "the CLI produced no report";
    return false;
  }
  if (strip_duration(first) != strip_duration(second)) {
    detail = "reports differ beyond the duration field";
    return false;
  }
  detail = "two CLI runs byte-identical outside duration_ms (" +
           std::to_string(first.size()) + " bytes)";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";
  int failures = 0;
  auto run = [&](const char* name, const std::function<bool(std::string&)>& criterion) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
  };

  run("reference-net-reproduction", reference_net);
  run("gradient-oracle", gradient_oracle);
  run("detector-unit-suite", detector_suite);
  run("window-semantics", window_semantics);
  run("correct-model-suite", correct_models);
  run("mapper-totality", mapper_totality);
  run("builtin-corpus-cli", [&](std::string& d) { return corpus_cli(cli, d); });
  run("report-determinism", [&](std::string& d) { return determinism(cli, d); });

  std::cout << (failures == 0 ? std::string("all criteria passed")
                              : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
