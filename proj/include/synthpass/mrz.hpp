#pragma once

// ICAO 9303 TD3 (passport) machine-readable zone.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "synthpass/core/report.hpp"

namespace synthpass {

struct SubjectRecord;

inline constexpr std::size_t kTd3LineLength = 44;
inline constexpr std::size_t kTd3NameLength = 39;

struct MrzTd3 {
  std::string line1;
  std::string line2;

  std::string text() const { return line1 + "\n" + line2; }
  bool operator==(const MrzTd3&) const = default;
};

class MrzError : public std::invalid_argument {
 public:
  MrzError(std::size_t position, const std::string& what)
      : std::invalid_argument(what), position_(position) {}
  /// 0-based offset of the offending character, or npos when not character-specific.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

bool is_mrz_char(char c);

/// Digits map to their value, A..Z to 10..35, '<' to 0. Throws MrzError for anything else.
int mrz_value(char c, std::size_t position = 0);

/// 7-3-1 weighted sum modulo 10.
int check_digit(std::string_view field);

/// Maps UTF-8 Latin text onto the MRZ alphabet: upper-case, diacritics stripped,
/// spaces and hyphens to '<', apostrophes dropped. Throws MrzError on unsupported characters.
std::string transliterate(std::string_view utf8);

struct EncodedName {
  std::string field;
  bool truncated = false;
};

EncodedName encode_name(std::string_view surname, std::string_view given, std::size_t width = kTd3NameLength);

/// Throws MrzError when a field does not fit its TD3 slot.
MrzTd3 build_td3(const SubjectRecord& record, std::string_view issuing_state);

ValidationReport validate_td3(std::string_view line1, std::string_view line2);

}  // namespace synthpass
