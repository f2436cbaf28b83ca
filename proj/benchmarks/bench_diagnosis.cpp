#include <benchmark/benchmark.h>

#include "traindx/traindx.hpp"

namespace {

using namespace traindx;

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

ModelSpec reference_net() {
  ModelSpec spec;
  spec.layers = {dense(50, 2), activation(ActivationFn::Relu),
                 dense(50),    activation(ActivationFn::Relu),
                 dense(1),     activation(ActivationFn::Sigmoid)};
  spec.loss = LossFn::BinaryCrossentropy;
  spec.optimizer = OptimizerKind::Rmsprop;
  spec.learning_rate = 0.001;
  spec.batch_size = 32;
  spec.epochs = 1;
  spec.seed = 7;
  return spec;
}

void bench_forward_backward(benchmark::State& state) {
  ModelSpec spec = reference_net();
  Rng rng(spec.seed);
  Model model = build_model(spec, rng);
  DatasetSpec data{"blobs", 128, 0.08, true, 11, LabelKind::Binary};
  auto [x, y] = load_or_generate(data);
  for (auto _ : state) {
    auto traces = forward(model, x);
    backward(model, traces, x, y);
    benchmark::DoNotOptimize(traces.back().dw);
  }
}
BENCHMARK(bench_forward_backward);

void bench_forward_hooks(benchmark::State& state) {
  ModelSpec spec = reference_net();
  Rng rng(spec.seed);
  Model model = build_model(spec, rng);
  DatasetSpec data{"blobs", 128, 0.08, true, 11, LabelKind::Binary};
  auto [x, y] = load_or_generate(data);
  auto traces = forward(model, x);
  MonitorState monitor{MonitorConfig{}};
  for (auto _ : state) {
    auto symptom = forward_hook(traces, y, monitor, 1, 1);
    benchmark::DoNotOptimize(symptom);
  }
}
BENCHMARK(bench_forward_hooks);

void bench_run_diagnosis(benchmark::State& state) {
  ModelSpec spec = reference_net();
  DatasetSpec data{"blobs", 128, 0.08, true, 11, LabelKind::Binary};
  auto [x, y] = load_or_generate(data);
  for (auto _ : state) {
    DiagnosisReport report = run_diagnosis(spec, x, y);
    benchmark::DoNotOptimize(report.verdict);
  }
}
BENCHMARK(bench_run_diagnosis);

}  // namespace

BENCHMARK_MAIN();
