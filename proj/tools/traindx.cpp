#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "traindx/serialize.hpp"
#include "traindx/traindx.hpp"

namespace {

struct ThresholdFlags {
  std::optional<int> history_window;
  std::optional<double> unchanged_tolerance;
  std::optional<double> saturation_max;
  std::optional<double> saturation_min;
  std::optional<double> saturation_ratio;
  std::optional<double> dead_threshold;
  std::optional<double> dead_ratio;
  std::optional<double> vanishing_threshold;
  std::optional<double> data_range_low;
  std::optional<double> data_range_high;
  std::optional<double> weight_var_min;
  std::optional<double> weight_var_max;
  std::optional<double> learn_threshold;
  std::optional<double> learn_band_factor;
  std::optional<int> depth_max_layers;
};

void add_threshold_flags(CLI::App& cmd, ThresholdFlags& f) {
  cmd.add_option("--history-window", f.history_window,
                 "Steps per windowed evaluation");
  cmd.add_option("--unchanged-tolerance", f.unchanged_tolerance,
                 "Relative tolerance for the unchanged-value check");
  cmd.add_option("--saturation-max", f.saturation_max, "Upper saturation bound");
  cmd.add_option("--saturation-min", f.saturation_min, "Lower saturation bound");
  cmd.add_option("--saturation-ratio", f.saturation_ratio,
                 "Saturated fraction that marks a layer");
  cmd.add_option("--dead-threshold", f.dead_threshold, "Dead-node output threshold");
  cmd.add_option("--dead-ratio", f.dead_ratio, "Dead fraction that marks a layer");
  cmd.add_option("--vanishing-threshold", f.vanishing_threshold,
                 "Mean |gradient| below this vanishes");
  cmd.add_option("--data-range-low", f.data_range_low, "Lower healthy input bound");
  cmd.add_option("--data-range-high", f.data_range_high, "Upper healthy input bound");
  cmd.add_option("--weight-var-min", f.weight_var_min, "Minimum healthy weight variance");
  cmd.add_option("--weight-var-max", f.weight_var_max, "Maximum healthy weight variance");
  cmd.add_option("--learn-threshold", f.learn_threshold,
                 "Healthy update-to-weight ratio");
  cmd.add_option("--learn-band-factor", f.learn_band_factor,
                 "Multiplicative half-width of the healthy ratio band");
  cmd.add_option("--depth-max-layers", f.depth_max_layers,
                 "Parameterized layers beyond this count as too deep");
}

traindx::MonitorConfig apply_flags(traindx::MonitorConfig cfg, const ThresholdFlags& f) {
  if (f.history_window) cfg.history_window = static_cast<std::size_t>(*f.history_window);
  if (f.unchanged_tolerance) cfg.unchanged_rel_tolerance = *f.unchanged_tolerance;
  if (f.saturation_max) cfg.saturation_max = *f.saturation_max;
  if (f.saturation_min) cfg.saturation_min = *f.saturation_min;
  if (f.saturation_ratio) cfg.saturation_layer_ratio = *f.saturation_ratio;
  if (f.dead_threshold) cfg.dead_node_threshold = *f.dead_threshold;
  if (f.dead_ratio) cfg.dead_node_layer_ratio = *f.dead_ratio;
  if (f.vanishing_threshold) cfg.vanishing_threshold = *f.vanishing_threshold;
  if (f.data_range_low) cfg.data_range_low = *f.data_range_low;
  if (f.data_range_high) cfg.data_range_high = *f.data_range_high;
  if (f.weight_var_min) cfg.weight_var_min = *f.weight_var_min;
  if (f.weight_var_max) cfg.weight_var_max = *f.weight_var_max;
  if (f.learn_threshold) cfg.learn_threshold = *f.learn_threshold;
  if (f.learn_band_factor) cfg.learn_band_factor = *f.learn_band_factor;
  if (f.depth_max_layers) cfg.depth_max_layers = *f.depth_max_layers;
  return cfg;
}

bool ends_with(const std::string& text, const std::string& suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-run diagnosis for small dense networks"};
  app.require_subcommand(1);

  // diagnose
  std::string model_path, data_path, out_path, config_path, corpus_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> epochs_override;
  bool explain = false;
  int label_cols = 1;
  bool csv_header = false;
  ThresholdFlags diagnose_flags, corpus_flags;

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Train a model under the monitor and report the first fault");
  diagnose->add_option("--model", model_path, "Model spec JSON file")->required();
  diagnose
      ->add_option("--data", data_path,
                   "Dataset spec JSON file, or a CSV file (trailing columns are labels)")
      ->required();
  diagnose->add_option("--out", out_path, "Write the report here instead of stdout");
  diagnose->add_option("--seed", seed_override, "Override the model spec seed");
  diagnose->add_option("--epochs", epochs_override, "Override the model spec epochs");
  diagnose->add_option("--config", config_path, "Monitor config JSON file");
  diagnose->add_flag("--explain", explain, "Include root-cause checker records");
  diagnose->add_option("--label-cols", label_cols, "CSV only: trailing label columns");
  diagnose->add_flag("--csv-header", csv_header, "CSV only: skip the first row");
  add_threshold_flags(*diagnose, diagnose_flags);

  CLI::App* corpus =
      app.add_subcommand("corpus", "Run the fault corpus and report pass/fail per case");
  corpus->add_option("--corpus", corpus_path,
                     "Corpus manifest JSON file (defaults to the built-in corpus)");
  add_threshold_flags(*corpus, corpus_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (diagnose->parsed()) {
      traindx::ModelSpec spec =
          traindx::parse_model_spec(traindx::read_text_file(model_path));
      if (seed_override) spec.seed = *seed_override;
      if (epochs_override) spec.epochs = *epochs_override;

      traindx::DatasetSpec data_spec;
      if (ends_with(data_path, ".csv")) {
        data_spec.source = data_path;
        data_spec.label_cols = label_cols;
        data_spec.csv_header = csv_header;
        data_spec.normalize = false;
      } else {
        data_spec = traindx::parse_dataset_spec(traindx::read_text_file(data_path));
      }
      auto [x, y] = traindx::load_or_generate(data_spec);

      traindx::MonitorConfig cfg;
      if (!config_path.empty())
        cfg = traindx::parse_monitor_config(traindx::read_text_file(config_path), cfg);
      cfg = apply_flags(cfg, diagnose_flags);

      traindx::DiagnosisReport report = traindx::run_diagnosis(spec, x, y, cfg, explain);
      std::string rendered = traindx::render_report(report);
      if (out_path.empty()) {
        std::cout << rendered;
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + out_path);
        out << rendered;
      }
      if (report.verdict == traindx::SymptomCode::CM) {
        std::cerr << "verdict: CM (no fault found)\n";
        return 0;
      }
      std::cerr << "verdict: " << to_string(report.verdict);
      if (report.symptom && report.symptom->layer)
        std::cerr << " at layer " << *report.symptom->layer;
      if (report.message) std::cerr << " -> " << traindx::render_message(*report.message);
      std::cerr << "\n";
      return 2;
    }

    std::vector<traindx::CorpusCase> cases;
    if (corpus_path.empty()) {
      cases = traindx::builtin_corpus();
    } else {
      std::string base_dir;
      auto slash = corpus_path.find_last_of('/');
      if (slash != std::string::npos) base_dir = corpus_path.substr(0, slash);
      cases =
          traindx::parse_corpus_manifest(traindx::read_text_file(corpus_path), base_dir);
    }
    traindx::MonitorConfig cfg = apply_flags({}, corpus_flags);
    int failures = traindx::run_corpus(cases, cfg, std::cout);
    return failures == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
