#pragma once

#include <string>

#include "sms/model.hpp"
#include "sms/tomlmini.hpp"

namespace sms {

struct ModelParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads and validates a system model file (see docs/model_format.md).
/// Throws ModelParseError on malformed input and ValidationError (listing
/// every violated invariant) on a well-formed but inconsistent model.
SystemModel load_system_model(const std::string& path);

/// Parses model text directly; `origin` names the source in error messages.
SystemModel parse_system_model(const std::string& text,
                               const std::string& origin = "<string>");

/// Serializes a model back to the file format. load(serialize(m)) == m
/// field-for-field.
std::string serialize_system_model(const SystemModel& model);

}  // namespace sms
