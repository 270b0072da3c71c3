#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace synthpass {

/// One failed check. `subject` names the offending element (layer id, field name, line).
struct Violation {
  std::string subject;
  std::string rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

inline bool has_rule(const ValidationReport& r, const std::string& rule) {
  for (const auto& v : r) {
    if (v.rule == rule) return true;
  }
  return false;
}

inline std::ostream& operator<<(std::ostream& os, const Violation& v) {
  return os << v.subject << ": [" << v.rule << "] " << v.message;
}

}  // namespace synthpass
