#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "traindx/dataset.hpp"
#include "traindx/model.hpp"
#include "traindx/monitor.hpp"
#include "traindx/symptoms.hpp"

namespace traindx {

/// What a corpus case is expected to produce. Absent fields are wildcards;
/// present ones must match the report exactly. message matches the rendered
/// message text.
struct Expectation {
  std::optional<SymptomCode> symptom;
  std::optional<Stage> stage;
  std::optional<int> layer;
  std::optional<MessageCode> message_code;
  std::optional<std::string> message;

  bool operator==(const Expectation&) const = default;
};

struct CorpusCase {
  std::string name;
  ModelSpec model;
  DatasetSpec data;
  Expectation expect;

  bool operator==(const CorpusCase&) const = default;
};

struct CaseResult {
  std::string name;
  bool pass = false;
  std::string detail;  // mismatch description, or the matched verdict
  double duration_ms = 0.0;
};

/// The six built-in buggy fixtures, each constructed to trip one detector.
std::vector<CorpusCase> builtin_corpus();

CaseResult run_case(const CorpusCase& c, const MonitorConfig& cfg);

/// Runs every case, printing one line per case plus a summary. Returns the
/// number of failing cases.
int run_corpus(const std::vector<CorpusCase>& cases, const MonitorConfig& cfg,
               std::ostream& out);

}  // namespace traindx
