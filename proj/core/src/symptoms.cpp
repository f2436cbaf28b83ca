#include "traindx/symptoms.hpp"

namespace traindx {

const char* message_guideline(MessageCode code) {
  switch (code) {
    case MessageCode::MSG0: return "Improper Data";
    case MessageCode::MSG1: return "Change the loss function";
    case MessageCode::MSG2: return "Change the activation function";
    case MessageCode::MSG3: return "Change the learning rate";
    case MessageCode::MSG4: return "Change the initialization of weight";
    case MessageCode::MSG5: return "Change the layer number";
    case MessageCode::MSG6: return "Change the optimizer";
  }
  return "?";
}

std::string render_message(const Message& msg) {
  std::string out = std::string(to_string(msg.code)) + ": " + message_guideline(msg.code);
  if (msg.target_layer) out += " at layer: " + std::to_string(*msg.target_layer);
  return out;
}

const char* to_string(SymptomCode code) {
  switch (code) {
    case SymptomCode::NS: return "NS";
    case SymptomCode::UCS: return "UCS";
    case SymptomCode::SAS: return "SAS";
    case SymptomCode::DNS: return "DNS";
    case SymptomCode::ORS: return "ORS";
    case SymptomCode::LNDS: return "LNDS";
    case SymptomCode::ANIS: return "ANIS";
    case SymptomCode::VGS: return "VGS";
    case SymptomCode::ILS: return "ILS";
    case SymptomCode::IAS: return "IAS";
    case SymptomCode::CM: return "CM";
  }
  return "?";
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::Forward: return "FW";
    case Stage::Backward: return "BW";
    case Stage::Global: return "GLOBAL";
  }
  return "?";
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::V1: return "V1";
    case Quantity::V2: return "V2";
    case Quantity::W: return "W";
    case Quantity::DW: return "DW";
    case Quantity::Loss: return "LOSS";
    case Quantity::Accuracy: return "ACC";
  }
  return "?";
}

const char* to_string(MessageCode code) {
  switch (code) {
    case MessageCode::MSG0: return "MSG0";
    case MessageCode::MSG1: return "MSG1";
    case MessageCode::MSG2: return "MSG2";
    case MessageCode::MSG3: return "MSG3";
    case MessageCode::MSG4: return "MSG4";
    case MessageCode::MSG5: return "MSG5";
    case MessageCode::MSG6: return "MSG6";
  }
  return "?";
}

namespace {

template <typename T>
std::optional<T> lookup(const std::string& name, std::initializer_list<T> values) {
  for (T v : values)
    if (name == to_string(v)) return v;
  return std::nullopt;
}

}  // namespace

std::optional<SymptomCode> symptom_code_from(const std::string& name) {
  return lookup(name, {SymptomCode::NS, SymptomCode::UCS, SymptomCode::SAS,
                       SymptomCode::DNS, SymptomCode::ORS, SymptomCode::LNDS,
                       SymptomCode::ANIS, SymptomCode::VGS, SymptomCode::ILS,
                       SymptomCode::IAS, SymptomCode::CM});
}

std::optional<Stage> stage_from(const std::string& name) {
  return lookup(name, {Stage::Forward, Stage::Backward, Stage::Global});
}

std::optional<Quantity> quantity_from(const std::string& name) {
  return lookup(name, {Quantity::V1, Quantity::V2, Quantity::W, Quantity::DW,
                       Quantity::Loss, Quantity::Accuracy});
}

std::optional<MessageCode> message_code_from(const std::string& name) {
  return lookup(name, {MessageCode::MSG0, MessageCode::MSG1, MessageCode::MSG2,
                       MessageCode::MSG3, MessageCode::MSG4, MessageCode::MSG5,
                       MessageCode::MSG6});
}

}  // namespace traindx
