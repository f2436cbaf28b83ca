#pragma once

#include <optional>
#include <string>

namespace traindx {

/// Failure symptoms observable during training, plus CM for a clean run.
enum class SymptomCode {
  NS,    // numerical error: NaN/inf or an all-zero tensor
  UCS,   // monitored value unchanged across the history window
  SAS,   // saturated logistic activation
  DNS,   // dead relu units
  ORS,   // final output range outside the label range
  LNDS,  // loss not decreasing
  ANIS,  // accuracy not increasing
  VGS,   // vanishing gradient
  ILS,   // invalid (NaN/inf) loss
  IAS,   // invalid (NaN/inf/zero) accuracy
  CM,    // correct model: no symptom fired
};

/// Where a symptom was observed.
enum class Stage { Forward, Backward, Global };

/// Which monitored quantity fired.
enum class Quantity { V1, V2, W, DW, Loss, Accuracy };

struct Symptom {
  SymptomCode code = SymptomCode::CM;
  Stage stage = Stage::Global;
  std::optional<int> layer;  // 1-based
  std::optional<Quantity> quantity;
  int epoch = 0;  // 1-based
  int batch = 0;  // 1-based within the epoch

  bool operator==(const Symptom&) const = default;
};

/// The seven actionable guidelines. Layer-specific messages carry the layer
/// they point at; global ones do not.
enum class MessageCode { MSG0, MSG1, MSG2, MSG3, MSG4, MSG5, MSG6 };

struct Message {
  MessageCode code = MessageCode::MSG0;
  std::optional<int> target_layer;

  bool operator==(const Message&) const = default;
};

/// Fixed guideline text per message code.
const char* message_guideline(MessageCode code);

/// Canonical rendering: "<code>: <guideline>[ at layer: <index>]".
std::string render_message(const Message& msg);

const char* to_string(SymptomCode code);
const char* to_string(Stage stage);
const char* to_string(Quantity q);
const char* to_string(MessageCode code);

std::optional<SymptomCode> symptom_code_from(const std::string& name);
std::optional<Stage> stage_from(const std::string& name);
std::optional<Quantity> quantity_from(const std::string& name);
std::optional<MessageCode> message_code_from(const std::string& name);

}  // namespace traindx
