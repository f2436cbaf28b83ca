#pragma once

#include <string>
#include <vector>

#include "traindx/corpus.hpp"
#include "traindx/dataset.hpp"
#include "traindx/detectors.hpp"
#include "traindx/model.hpp"
#include "traindx/monitor.hpp"

namespace traindx {

// JSON boundary of the library. Parsers reject unknown fields at every level
// and throw std::invalid_argument naming the offending field; semantic rules
// are enforced by the same validators the in-memory API uses.

ModelSpec parse_model_spec(const std::string& json_text);

DatasetSpec parse_dataset_spec(const std::string& json_text);

/// Starts from `base` and overrides whichever threshold fields are present.
MonitorConfig parse_monitor_config(const std::string& json_text, MonitorConfig base = {});

/// Flat report object with alphabetically ordered keys. Absent values render
/// as null; non-finite numbers render as the strings "nan", "inf", "-inf".
std::string render_report(const DiagnosisReport& report);

/// Inverse of render_report for finite-valued reports:
/// parse_report(render_report(r)) == r.
DiagnosisReport parse_report(const std::string& json_text);

/// Manifest: {"cases": [{"name", "model", "data", "expect"}...]}. "model" and
/// "data" are either inline objects or paths (resolved against base_dir) to
/// JSON files; every "expect" field is optional and unset fields match
/// anything.
std::vector<CorpusCase> parse_corpus_manifest(const std::string& json_text,
                                              const std::string& base_dir);

/// Reads a whole file, throwing std::runtime_error with the path on failure.
std::string read_text_file(const std::string& path);

}  // namespace traindx
