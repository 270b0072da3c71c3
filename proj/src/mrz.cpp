#include "synthpass/mrz.hpp"

#include <cstdio>
#include <unordered_map>

#include "synthpass/core/date.hpp"
#include "synthpass/core/text_util.hpp"
#include "synthpass/subject_gen.hpp"

namespace synthpass {

namespace {

constexpr int kWeights[3] = {7, 3, 1};

// Latin letters with diacritics used in Polish, Spanish and Portuguese names.
const std::unordered_map<char32_t, char>& transliteration_table() {
  static const std::unordered_map<char32_t, char> table = {
      {U'À', 'A'}, {U'Á', 'A'}, {U'Â', 'A'}, {U'Ã', 'A'}, {U'Ä', 'A'}, {U'Ą', 'A'},
      {U'Ç', 'C'}, {U'Ć', 'C'}, {U'È', 'E'}, {U'É', 'E'}, {U'Ê', 'E'}, {U'Ë', 'E'},
      {U'Ę', 'E'}, {U'Ì', 'I'}, {U'Í', 'I'}, {U'Î', 'I'}, {U'Ï', 'I'}, {U'Ł', 'L'},
      {U'Ñ', 'N'}, {U'Ń', 'N'}, {U'Ò', 'O'}, {U'Ó', 'O'}, {U'Ô', 'O'}, {U'Õ', 'O'},
      {U'Ö', 'O'}, {U'Ś', 'S'}, {U'Ù', 'U'}, {U'Ú', 'U'}, {U'Û', 'U'}, {U'Ü', 'U'},
      {U'Ý', 'Y'}, {U'Ź', 'Z'}, {U'Ż', 'Z'},
  };
  return table;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), '<');
  return s;
}

std::string yymmdd(const Date& d) { return format_date(d, "%y%m%d"); }

char digit_char(int d) { return static_cast<char>('0' + d); }

struct CheckedField {
  const char* name;
  // 0-based [begin, end) of the data and the position of its check digit.
  std::size_t begin;
  std::size_t end;
  std::size_t check;
};

constexpr CheckedField kLine2Fields[] = {
    {"document_number", 0, 9, 9},
    {"birth_date", 13, 19, 19},
    {"expiry_date", 21, 27, 27},
    {"personal_number", 28, 42, 42},
};

std::string composite_input(std::string_view line2) {
  std::string s;
  s.append(line2.substr(0, 10));
  s.append(line2.substr(13, 7));
  s.append(line2.substr(21, 22));
  return s;
}

}  // namespace

bool is_mrz_char(char c) { return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || c == '<'; }

int mrz_value(char c, std::size_t position) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  if (c == '<') return 0;
  throw MrzError(position, "illegal MRZ character '" + std::string(1, c) + "' at position " +
                               std::to_string(position));
}

int check_digit(std::string_view field) {
  int sum = 0;
  for (std::size_t i = 0; i < field.size(); ++i) sum += mrz_value(field[i], i) * kWeights[i % 3];
  return sum % 10;
}

std::string transliterate(std::string_view utf8) {
  std::u32string text;
  try {
    text = to_upper(utf8_decode(utf8));
  } catch (const std::invalid_argument& e) {
    throw MrzError(std::string::npos, e.what());
  }
  const auto& table = transliteration_table();
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    if ((c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || c == U'<') {
      out += static_cast<char>(c);
    } else if (c == U' ' || c == U'-') {
      out += '<';
    } else if (c == U'\'' || c == U'’') {
      continue;
    } else if (const auto it = table.find(c); it != table.end()) {
      out += it->second;
    } else {
      throw MrzError(i, "no MRZ transliteration for U+" + [&] {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(c));
        return std::string(buf);
      }() + " at character " + std::to_string(i));
    }
  }
  return out;
}

EncodedName encode_name(std::string_view surname, std::string_view given, std::size_t width) {
  std::string field = transliterate(surname);
  const std::string g = transliterate(given);
  if (!g.empty()) field += "<<" + g;
  EncodedName out;
  if (field.size() > width) {
    field.resize(width);
    out.truncated = true;
  }
  out.field = pad(std::move(field), width);
  return out;
}

MrzTd3 build_td3(const SubjectRecord& r, std::string_view issuing_state) {
  const std::string state = transliterate(issuing_state);
  const std::string nationality = transliterate(r.nationality);
  if (state.empty() || state.size() > 3) throw MrzError(2, "issuing state '" + state + "' is not a 3-letter code");
  if (nationality.empty() || nationality.size() > 3) {
    throw MrzError(10, "nationality '" + nationality + "' is not a 3-letter code");
  }
  const std::string doc = transliterate(r.document_number);
  if (doc.empty() || doc.size() > 9) {
    throw MrzError(0, "document number '" + doc + "' does not fit the 9-character field");
  }
  const std::string personal = r.personal_number ? transliterate(*r.personal_number) : std::string();
  if (personal.size() > 14) {
    throw MrzError(28, "personal number '" + personal + "' does not fit the 14-character field");
  }

  MrzTd3 m;
  m.line1 = "P<" + pad(state, 3) + encode_name(r.surname, r.given_name).field;

  std::string l2;
  const std::string doc_field = pad(doc, 9);
  l2 += doc_field;
  l2 += digit_char(check_digit(doc_field));
  l2 += pad(nationality, 3);
  const std::string birth = yymmdd(r.birth_date);
  l2 += birth;
  l2 += digit_char(check_digit(birth));
  l2 += sex_code(r.sex);
  const std::string expiry = yymmdd(r.expiry_date);
  l2 += expiry;
  l2 += digit_char(check_digit(expiry));
  const std::string personal_field = pad(personal, 14);
  l2 += personal_field;
  l2 += digit_char(check_digit(personal_field));
  l2 += digit_char(check_digit(composite_input(l2)));
  m.line2 = std::move(l2);
  return m;
}

ValidationReport validate_td3(std::string_view line1, std::string_view line2) {
  ValidationReport v;
  bool lengths_ok = true;
  for (const auto& [name, line] : {std::pair{"line1", line1}, std::pair{"line2", line2}}) {
    if (line.size() != kTd3LineLength) {
      lengths_ok = false;
      v.push_back({name, "length", "expected 44 characters, got " + std::to_string(line.size())});
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (!is_mrz_char(line[i])) {
        v.push_back({name, "alphabet", "illegal character at position " + std::to_string(i + 1)});
      }
    }
  }
  if (line1.empty() || line1[0] != 'P') v.push_back({"line1", "document_type", "TD3 passports start with 'P'"});
  if (!lengths_ok || has_rule(v, "alphabet")) return v;

  auto verify = [&](const std::string& name, std::string_view data, char check) {
    const int expected = check_digit(data);
    if (check != digit_char(expected)) {
      v.push_back({name, "check_digit", "check digit '" + std::string(1, check) + "' should be " +
                                            std::to_string(expected)});
    }
  };
  for (const auto& f : kLine2Fields) verify(f.name, line2.substr(f.begin, f.end - f.begin), line2[f.check]);
  verify("composite", composite_input(line2), line2[43]);
  if (line2[20] != 'M' && line2[20] != 'F') {
    v.push_back({"sex", "sex", "sex must be 'M' or 'F', got '" + std::string(1, line2[20]) + "'"});
  }
  return v;
}

}  // namespace synthpass
