#pragma once

#include <string>
#include <vector>

#include "opinionflow/model.hpp"

namespace opinionflow {

struct Violation {
  enum class Severity { Error, Warning };

  /// Name of the violated assumption: "In1", "In2", "D1", "D2", "Dif", "P",
  /// "troll-diffusion", "strong-leaders", "troll-interaction", "structure".
  std::string assumption;
  std::string species;  // empty for model-wide findings
  std::string message;
  Severity severity = Severity::Error;
};

struct ValidationReport {
  std::vector<Violation> violations;

  /// True when no Error-severity entry is present.
  bool ok() const;
  bool empty() const { return violations.empty(); }
  bool mentions(const std::string& assumption) const;
  std::string to_string() const;
};

/// Checks a model against the well-posedness assumptions. Never throws.
ValidationReport validate(const ModelSpec& spec);

}  // namespace opinionflow
