#pragma once

#include <optional>
#include <string_view>

namespace synthpass {

enum class Label { BonaFide, Attack };
enum class Pai { None, Print, Screen };

inline std::string_view to_string(Label l) { return l == Label::BonaFide ? "bonafide" : "attack"; }

inline std::string_view to_string(Pai p) {
  switch (p) {
    case Pai::None: return "none";
    case Pai::Print: return "print";
    case Pai::Screen: return "screen";
  }
  return "?";
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "bonafide") return Label::BonaFide;
  if (s == "attack") return Label::Attack;
  return std::nullopt;
}

inline std::optional<Pai> parse_pai(std::string_view s) {
  if (s == "none") return Pai::None;
  if (s == "print") return Pai::Print;
  if (s == "screen") return Pai::Screen;
  return std::nullopt;
}

/// bonafide <=> none.
inline bool consistent(Label l, Pai p) { return (l == Label::BonaFide) == (p == Pai::None); }

}  // namespace synthpass
