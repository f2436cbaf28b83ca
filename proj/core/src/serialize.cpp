#include "traindx/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace traindx {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(context + ": invalid JSON: " + e.what());
  }
}

void expect_fields(const json& obj, const std::string& context,
                   std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw std::invalid_argument(context + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* name : allowed)
      if (it.key() == name) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument(context + ": unknown field '" + it.key() + "'");
  }
}

[[noreturn]] void bad_type(const std::string& context, const char* field,
                           const char* expected) {
  throw std::invalid_argument(context + ": field '" + field + "' must be " + expected);
}

double get_number(const json& obj, const std::string& context, const char* field,
                  double fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_number()) bad_type(context, field, "a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& context, const char* field, int fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_number_integer()) bad_type(context, field, "an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& obj, const std::string& context, const char* field,
                      std::uint64_t fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    bad_type(context, field, "a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& context, const char* field,
              bool fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_boolean()) bad_type(context, field, "a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& context, const char* field,
                       const std::string& fallback) {
  if (!obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_string()) bad_type(context, field, "a string");
  return v.get<std::string>();
}

template <typename E>
E enum_from(const std::string& text, std::initializer_list<E> all,
            const std::string& context, const char* field) {
  for (E e : all)
    if (text == to_string(e)) return e;
  throw std::invalid_argument(context + ": field '" + field + "' has unknown value '" +
                              text + "'");
}

constexpr std::initializer_list<ActivationFn> kActivations = {
    ActivationFn::Relu, ActivationFn::Sigmoid, ActivationFn::Tanh, ActivationFn::Softmax,
    ActivationFn::Linear};
constexpr std::initializer_list<LossFn> kLosses = {
    LossFn::Mse, LossFn::BinaryCrossentropy, LossFn::CategoricalCrossentropy};
constexpr std::initializer_list<OptimizerKind> kOptimizers = {
    OptimizerKind::Sgd, OptimizerKind::Rmsprop, OptimizerKind::Adam};
constexpr std::initializer_list<InitKind> kInits = {
    InitKind::GlorotUniform, InitKind::UniformSmall, InitKind::Constant};
constexpr std::initializer_list<Task> kTasks = {Task::Classification, Task::Regression};
constexpr std::initializer_list<LabelKind> kLabelKinds = {
    LabelKind::Binary, LabelKind::OneHot, LabelKind::Continuous};

LayerSpec parse_layer(const json& obj, int index) {
  std::string context = "layer " + std::to_string(index);
  if (!obj.is_object())
    throw std::invalid_argument(context + ": expected a JSON object");
  std::string kind = get_string(obj, context, "kind", "");
  LayerSpec layer;
  if (kind == "dense") {
    expect_fields(obj, context,
                  {"kind", "units", "inputs", "init", "init_value", "init_scale",
                   "bias_value"});
    layer.kind = LayerKind::Dense;
    layer.units = get_int(obj, context, "units", 0);
    layer.inputs = get_int(obj, context, "inputs", 0);
    layer.init =
        enum_from(get_string(obj, context, "init", to_string(layer.init)), kInits,
                  context, "init");
    layer.init_value = get_number(obj, context, "init_value", layer.init_value);
    layer.init_scale = get_number(obj, context, "init_scale", layer.init_scale);
    layer.bias_value = get_number(obj, context, "bias_value", layer.bias_value);
  } else if (kind == "activation") {
    expect_fields(obj, context, {"kind", "activation"});
    layer.kind = LayerKind::Activation;
    layer.activation = enum_from(get_string(obj, context, "activation", "relu"),
                                 kActivations, context, "activation");
  } else if (kind == "dropout") {
    expect_fields(obj, context, {"kind", "rate"});
    layer.kind = LayerKind::Dropout;
    layer.rate = get_number(obj, context, "rate", 0.0);
  } else {
    throw std::invalid_argument(context + ": field 'kind' has unknown value '" + kind +
                                "'");
  }
  return layer;
}

ModelSpec model_spec_from_json(const json& root) {
  const std::string context = "model spec";
  expect_fields(root, context,
                {"layers", "loss", "optimizer", "learning_rate", "batch_size", "epochs",
                 "seed", "task", "clamp_crossentropy"});
  ModelSpec spec;
  if (!root.contains("layers") || !root.at("layers").is_array())
    throw std::invalid_argument(context + ": field 'layers' must be an array");
  int index = 1;
  for (const json& layer : root.at("layers")) spec.layers.push_back(parse_layer(layer, index++));
  spec.loss = enum_from(get_string(root, context, "loss", to_string(spec.loss)), kLosses,
                        context, "loss");
  spec.optimizer =
      enum_from(get_string(root, context, "optimizer", to_string(spec.optimizer)),
                kOptimizers, context, "optimizer");
  spec.learning_rate = get_number(root, context, "learning_rate", spec.learning_rate);
  spec.batch_size = get_int(root, context, "batch_size", spec.batch_size);
  spec.epochs = get_int(root, context, "epochs", spec.epochs);
  spec.seed = get_u64(root, context, "seed", spec.seed);
  spec.task = enum_from(get_string(root, context, "task", to_string(spec.task)), kTasks,
                        context, "task");
  spec.clamp_crossentropy =
      get_bool(root, context, "clamp_crossentropy", spec.clamp_crossentropy);
  validate_model_spec(spec);
  return spec;
}

DatasetSpec dataset_spec_from_json(const json& root) {
  const std::string context = "dataset spec";
  expect_fields(root, context,
                {"source", "samples", "noise", "normalize", "seed", "label_kind",
                 "classes", "label_cols", "csv_header"});
  DatasetSpec spec;
  spec.source = get_string(root, context, "source", spec.source);
  int samples = get_int(root, context, "samples", static_cast<int>(spec.samples));
  if (samples <= 0)
    throw std::invalid_argument(context + ": field 'samples' must be positive");
  spec.samples = static_cast<std::size_t>(samples);
  spec.noise = get_number(root, context, "noise", spec.noise);
  spec.normalize = get_bool(root, context, "normalize", spec.normalize);
  spec.seed = get_u64(root, context, "seed", spec.seed);
  spec.label_kind =
      enum_from(get_string(root, context, "label_kind", to_string(spec.label_kind)),
                kLabelKinds, context, "label_kind");
  spec.classes = get_int(root, context, "classes", spec.classes);
  spec.label_cols = get_int(root, context, "label_cols", spec.label_cols);
  spec.csv_header = get_bool(root, context, "csv_header", spec.csv_header);
  return spec;
}

// Non-finite doubles have no JSON number form; tag them as strings so a
// report with an invalid loss still round-trips.
json finite_or_tag(double v) {
  if (std::isnan(v)) return json("nan");
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

double number_or_tag(const json& v, const std::string& context, const char* field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  bad_type(context, field, "a number or one of \"nan\", \"inf\", \"-inf\"");
}

json optional_number(const std::optional<double>& v) {
  return v ? finite_or_tag(*v) : json(nullptr);
}

std::optional<double> parse_optional_number(const json& obj, const std::string& context,
                                            const char* field) {
  if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
  return number_or_tag(obj.at(field), context, field);
}

std::optional<int> parse_optional_int(const json& obj, const std::string& context,
                                      const char* field) {
  if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
  const json& v = obj.at(field);
  if (!v.is_number_integer()) bad_type(context, field, "an integer");
  return v.get<int>();
}

std::optional<std::string> parse_optional_string(const json& obj,
                                                 const std::string& context,
                                                 const char* field) {
  if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
  const json& v = obj.at(field);
  if (!v.is_string()) bad_type(context, field, "a string");
  return v.get<std::string>();
}

json config_to_json(const MonitorConfig& cfg) {
  json j;
  j["history_window"] = cfg.history_window;
  j["unchanged_rel_tolerance"] = cfg.unchanged_rel_tolerance;
  j["saturation_max"] = cfg.saturation_max;
  j["saturation_min"] = cfg.saturation_min;
  j["saturation_layer_ratio"] = cfg.saturation_layer_ratio;
  j["dead_node_threshold"] = cfg.dead_node_threshold;
  j["dead_node_layer_ratio"] = cfg.dead_node_layer_ratio;
  j["vanishing_threshold"] = cfg.vanishing_threshold;
  j["data_range_low"] = cfg.data_range_low;
  j["data_range_high"] = cfg.data_range_high;
  j["weight_var_min"] = cfg.weight_var_min;
  j["weight_var_max"] = cfg.weight_var_max;
  j["learn_threshold"] = cfg.learn_threshold;
  j["learn_band_factor"] = cfg.learn_band_factor;
  j["depth_max_layers"] = cfg.depth_max_layers;
  return j;
}

MonitorConfig config_from_json(const json& root, MonitorConfig cfg) {
  const std::string context = "monitor config";
  expect_fields(root, context,
                {"history_window", "unchanged_rel_tolerance", "saturation_max",
                 "saturation_min", "saturation_layer_ratio", "dead_node_threshold",
                 "dead_node_layer_ratio", "vanishing_threshold", "data_range_low",
                 "data_range_high", "weight_var_min", "weight_var_max",
                 "learn_threshold", "learn_band_factor", "depth_max_layers"});
  int window = get_int(root, context, "history_window",
                       static_cast<int>(cfg.history_window));
  if (window <= 0)
    throw std::invalid_argument(context + ": field 'history_window' must be positive");
  cfg.history_window = static_cast<std::size_t>(window);
  cfg.unchanged_rel_tolerance =
      get_number(root, context, "unchanged_rel_tolerance", cfg.unchanged_rel_tolerance);
  cfg.saturation_max = get_number(root, context, "saturation_max", cfg.saturation_max);
  cfg.saturation_min = get_number(root, context, "saturation_min", cfg.saturation_min);
  cfg.saturation_layer_ratio =
      get_number(root, context, "saturation_layer_ratio", cfg.saturation_layer_ratio);
  cfg.dead_node_threshold =
      get_number(root, context, "dead_node_threshold", cfg.dead_node_threshold);
  cfg.dead_node_layer_ratio =
      get_number(root, context, "dead_node_layer_ratio", cfg.dead_node_layer_ratio);
  cfg.vanishing_threshold =
      get_number(root, context, "vanishing_threshold", cfg.vanishing_threshold);
  cfg.data_range_low = get_number(root, context, "data_range_low", cfg.data_range_low);
  cfg.data_range_high = get_number(root, context, "data_range_high", cfg.data_range_high);
  cfg.weight_var_min = get_number(root, context, "weight_var_min", cfg.weight_var_min);
  cfg.weight_var_max = get_number(root, context, "weight_var_max", cfg.weight_var_max);
  cfg.learn_threshold = get_number(root, context, "learn_threshold", cfg.learn_threshold);
  cfg.learn_band_factor =
      get_number(root, context, "learn_band_factor", cfg.learn_band_factor);
  cfg.depth_max_layers = get_int(root, context, "depth_max_layers", cfg.depth_max_layers);
  return cfg;
}

}  // namespace

ModelSpec parse_model_spec(const std::string& json_text) {
  return model_spec_from_json(parse_json(json_text, "model spec"));
}

DatasetSpec parse_dataset_spec(const std::string& json_text) {
  return dataset_spec_from_json(parse_json(json_text, "dataset spec"));
}

MonitorConfig parse_monitor_config(const std::string& json_text, MonitorConfig base) {
  return config_from_json(parse_json(json_text, "monitor config"), base);
}

std::string render_report(const DiagnosisReport& report) {
  json j;
  j["verdict"] = to_string(report.verdict);
  if (report.symptom) {
    j["symptom"] = to_string(report.symptom->code);
    j["stage"] = to_string(report.symptom->stage);
    j["layer"] = report.symptom->layer ? json(*report.symptom->layer) : json(nullptr);
    j["quantity"] =
        report.symptom->quantity ? json(to_string(*report.symptom->quantity)) : json(nullptr);
    j["epoch"] = report.symptom->epoch;
    j["batch"] = report.symptom->batch;
  } else {
    j["symptom"] = nullptr;
    j["stage"] = nullptr;
    j["layer"] = nullptr;
    j["quantity"] = nullptr;
    j["epoch"] = nullptr;
    j["batch"] = nullptr;
  }
  if (report.message) {
    j["message_code"] = to_string(report.message->code);
    j["message_layer"] =
        report.message->target_layer ? json(*report.message->target_layer) : json(nullptr);
    j["message_text"] = render_message(*report.message);
  } else {
    j["message_code"] = nullptr;
    j["message_layer"] = nullptr;
    j["message_text"] = nullptr;
  }
  j["final_loss"] = optional_number(report.final_loss);
  j["final_accuracy"] = optional_number(report.final_accuracy);
  json layers = json::array();
  for (const LayerSummary& s : report.layers) {
    json l;
    l["index"] = s.index;
    l["kind"] = s.kind;
    l["activation"] = s.activation ? json(*s.activation) : json(nullptr);
    l["v1_mean"] = optional_number(s.v1_mean);
    l["v1_var"] = optional_number(s.v1_var);
    l["v2_mean"] = optional_number(s.v2_mean);
    l["v2_var"] = optional_number(s.v2_var);
    l["w_mean"] = optional_number(s.w_mean);
    l["w_var"] = optional_number(s.w_var);
    l["dw_mean"] = optional_number(s.dw_mean);
    l["dw_var"] = optional_number(s.dw_var);
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  json checkers = json::array();
  for (const CheckerRecord& c : report.checkers) {
    json record;
    record["name"] = c.name;
    record["fired"] = c.fired;
    record["detail"] = c.detail;
    checkers.push_back(std::move(record));
  }
  j["checkers"] = std::move(checkers);
  j["notes"] = report.notes;
  j["duration_ms"] = report.duration_ms;
  j["config"] = config_to_json(report.config);
  return j.dump(2) + "\n";
}

DiagnosisReport parse_report(const std::string& json_text) {
  const std::string context = "report";
  json root = parse_json(json_text, context);
  expect_fields(root, context,
                {"verdict", "symptom", "stage", "layer", "quantity", "epoch", "batch",
                 "message_code", "message_layer", "message_text", "final_loss",
                 "final_accuracy", "layers", "checkers", "notes", "duration_ms",
                 "config"});
  DiagnosisReport report;
  std::string verdict = get_string(root, context, "verdict", "");
  auto verdict_code = symptom_code_from(verdict);
  if (!verdict_code)
    throw std::invalid_argument(context + ": field 'verdict' has unknown value '" +
                                verdict + "'");
  report.verdict = *verdict_code;
  if (auto code_text = parse_optional_string(root, context, "symptom")) {
    Symptom s;
    auto code = symptom_code_from(*code_text);
    if (!code)
      throw std::invalid_argument(context + ": field 'symptom' has unknown value '" +
                                  *code_text + "'");
    s.code = *code;
    auto stage_text = parse_optional_string(root, context, "stage");
    std::optional<Stage> stage =
        stage_text ? stage_from(*stage_text) : std::optional<Stage>{};
    if (!stage)
      throw std::invalid_argument(context + ": field 'stage' is required with a symptom");
    s.stage = *stage;
    s.layer = parse_optional_int(root, context, "layer");
    if (auto q_text = parse_optional_string(root, context, "quantity")) {
      auto q = quantity_from(*q_text);
      if (!q)
        throw std::invalid_argument(context + ": field 'quantity' has unknown value '" +
                                    *q_text + "'");
      s.quantity = *q;
    }
    s.epoch = parse_optional_int(root, context, "epoch").value_or(0);
    s.batch = parse_optional_int(root, context, "batch").value_or(0);
    report.symptom = s;
  }
  if (auto code_text = parse_optional_string(root, context, "message_code")) {
    Message m;
    auto code = message_code_from(*code_text);
    if (!code)
      throw std::invalid_argument(context + ": field 'message_code' has unknown value '" +
                                  *code_text + "'");
    m.code = *code;
    m.target_layer = parse_optional_int(root, context, "message_layer");
    report.message = m;
  }
  report.final_loss = parse_optional_number(root, context, "final_loss");
  report.final_accuracy = parse_optional_number(root, context, "final_accuracy");
  if (root.contains("layers")) {
    if (!root.at("layers").is_array())
      throw std::invalid_argument(context + ": field 'layers' must be an array");
    int index = 1;
    for (const json& l : root.at("layers")) {
      std::string layer_context = context + " layer " + std::to_string(index++);
      expect_fields(l, layer_context,
                    {"index", "kind", "activation", "v1_mean", "v1_var", "v2_mean",
                     "v2_var", "w_mean", "w_var", "dw_mean", "dw_var"});
      LayerSummary s;
      s.index = get_int(l, layer_context, "index", 0);
      s.kind = get_string(l, layer_context, "kind", "");
      s.activation = parse_optional_string(l, layer_context, "activation");
      s.v1_mean = parse_optional_number(l, layer_context, "v1_mean");
      s.v1_var = parse_optional_number(l, layer_context, "v1_var");
      s.v2_mean = parse_optional_number(l, layer_context, "v2_mean");
      s.v2_var = parse_optional_number(l, layer_context, "v2_var");
      s.w_mean = parse_optional_number(l, layer_context, "w_mean");
      s.w_var = parse_optional_number(l, layer_context, "w_var");
      s.dw_mean = parse_optional_number(l, layer_context, "dw_mean");
      s.dw_var = parse_optional_number(l, layer_context, "dw_var");
      report.layers.push_back(std::move(s));
    }
  }
  if (root.contains("checkers")) {
    if (!root.at("checkers").is_array())
      throw std::invalid_argument(context + ": field 'checkers' must be an array");
    for (const json& c : root.at("checkers")) {
      std::string checker_context = context + " checker";
      expect_fields(c, checker_context, {"name", "fired", "detail"});
      CheckerRecord record;
      record.name = get_string(c, checker_context, "name", "");
      record.fired = get_bool(c, checker_context, "fired", false);
      record.detail = get_string(c, checker_context, "detail", "");
      report.checkers.push_back(std::move(record));
    }
  }
  if (root.contains("notes")) {
    if (!root.at("notes").is_array())
      throw std::invalid_argument(context + ": field 'notes' must be an array");
    for (const json& n : root.at("notes")) {
      if (!n.is_string())
        throw std::invalid_argument(context + ": notes entries must be strings");
      report.notes.push_back(n.get<std::string>());
    }
  }
  report.duration_ms = get_number(root, context, "duration_ms", 0.0);
  if (root.contains("config")) report.config = config_from_json(root.at("config"), {});
  return report;
}

std::vector<CorpusCase> parse_corpus_manifest(const std::string& json_text,
                                              const std::string& base_dir) {
  const std::string context = "corpus manifest";
  json root = parse_json(json_text, context);
  expect_fields(root, context, {"cases"});
  if (!root.contains("cases") || !root.at("cases").is_array())
    throw std::invalid_argument(context + ": field 'cases' must be an array");

  auto resolve = [&base_dir](const std::string& path) {
    if (path.empty() || path.front() == '/' || base_dir.empty()) return path;
    return base_dir + "/" + path;
  };

  std::vector<CorpusCase> cases;
  int index = 1;
  for (const json& entry : root.at("cases")) {
    std::string case_context = "corpus case " + std::to_string(index++);
    expect_fields(entry, case_context, {"name", "model", "data", "expect"});
    CorpusCase c;
    c.name = get_string(entry, case_context, "name", case_context);
    if (!entry.contains("model"))
      throw std::invalid_argument(case_context + ": field 'model' is required");
    const json& model = entry.at("model");
    if (model.is_string())
      c.model = parse_model_spec(read_text_file(resolve(model.get<std::string>())));
    else
      c.model = model_spec_from_json(model);
    if (!entry.contains("data"))
      throw std::invalid_argument(case_context + ": field 'data' is required");
    const json& data = entry.at("data");
    if (data.is_string())
      c.data = parse_dataset_spec(read_text_file(resolve(data.get<std::string>())));
    else
      c.data = dataset_spec_from_json(data);
    if (entry.contains("expect")) {
      const json& expect = entry.at("expect");
      std::string expect_context = case_context + " expect";
      expect_fields(expect, expect_context,
                    {"symptom", "stage", "layer", "message_code", "message"});
      if (auto text = parse_optional_string(expect, expect_context, "symptom")) {
        auto code = symptom_code_from(*text);
        if (!code)
          throw std::invalid_argument(expect_context +
                                      ": field 'symptom' has unknown value '" + *text + "'");
        c.expect.symptom = *code;
      }
      if (auto text = parse_optional_string(expect, expect_context, "stage")) {
        auto stage = stage_from(*text);
        if (!stage)
          throw std::invalid_argument(expect_context +
                                      ": field 'stage' has unknown value '" + *text + "'");
        c.expect.stage = *stage;
      }
      c.expect.layer = parse_optional_int(expect, expect_context, "layer");
      if (auto text = parse_optional_string(expect, expect_context, "message_code")) {
        auto code = message_code_from(*text);
        if (!code)
          throw std::invalid_argument(
              expect_context + ": field 'message_code' has unknown value '" + *text + "'");
        c.expect.message_code = *code;
      }
      c.expect.message = parse_optional_string(expect, expect_context, "message");
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace traindx
