#include "synthpass/subject_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_set>

#include "synthpass/core/text_util.hpp"

namespace synthpass {

char sex_code(Sex s) { return s == Sex::Male ? 'M' : 'F'; }

std::string_view to_string(DictionaryCategory c) {
  switch (c) {
    case DictionaryCategory::GivenMale: return "given_male";
    case DictionaryCategory::GivenFemale: return "given_female";
    case DictionaryCategory::Surname: return "surname";
    case DictionaryCategory::City: return "city";
    case DictionaryCategory::Authority: return "authority";
  }
  return "?";
}

Dictionary make_dictionary(DictionaryCategory category, const std::vector<std::string>& entries) {
  Dictionary d;
  d.category = category;
  std::unordered_set<std::string> seen;
  for (const auto& raw : entries) {
    std::string e = trim(raw);
    if (e.empty() || e.front() == '#') continue;
    if (seen.insert(e).second) d.entries.push_back(std::move(e));
  }
  return d;
}

Dictionary load_dictionary(const std::filesystem::path& path, DictionaryCategory category) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GenerationError("cannot open " + std::string(to_string(category)) + " dictionary " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    try {
      utf8_decode(line);
    } catch (const std::invalid_argument& e) {
      throw GenerationError(path.string() + ": " + e.what());
    }
    lines.push_back(line);
  }
  Dictionary d = make_dictionary(category, lines);
  if (d.entries.empty()) throw GenerationError(path.string() + ": dictionary is empty");
  return d;
}

const Dictionary& Dictionaries::get(DictionaryCategory c) const {
  const auto it = by_category.find(c);
  if (it == by_category.end() || it->second.entries.empty()) {
    throw GenerationError("missing dictionary category '" + std::string(to_string(c)) + "'");
  }
  return it->second;
}

Dictionaries load_dictionaries(const CountryConfig& config) {
  Dictionaries d;
  d.add(load_dictionary(config.dictionaries.given_male, DictionaryCategory::GivenMale));
  d.add(load_dictionary(config.dictionaries.given_female, DictionaryCategory::GivenFemale));
  d.add(load_dictionary(config.dictionaries.surname, DictionaryCategory::Surname));
  d.add(load_dictionary(config.dictionaries.city, DictionaryCategory::City));
  d.add(load_dictionary(config.dictionaries.authority, DictionaryCategory::Authority));
  return d;
}

// ---------------------------------------------------------------------------

IdPattern::IdPattern(std::string_view pattern) : source_(pattern) {
  std::size_t i = 0;
  auto bad = [&](const std::string& why) {
    throw std::invalid_argument("identifier pattern '" + source_ + "': " + why);
  };
  while (i < pattern.size()) {
    Token t;
    if (pattern[i] == '[') {
      const auto close = pattern.find(']', i);
      if (close == std::string_view::npos) bad("unterminated character class");
      std::set<char> chars;
      for (std::size_t k = i + 1; k < close; ++k) {
        if (k + 2 < close && pattern[k + 1] == '-') {
          if (pattern[k] > pattern[k + 2]) bad("reversed range");
          for (char c = pattern[k]; c <= pattern[k + 2]; ++c) chars.insert(c);
          k += 2;
        } else {
          chars.insert(pattern[k]);
        }
      }
      if (chars.empty()) bad("empty character class");
      t.alphabet.assign(chars.begin(), chars.end());
      i = close + 1;
    } else if (pattern[i] == '{' || pattern[i] == ']' || pattern[i] == '}') {
      bad("unexpected '" + std::string(1, pattern[i]) + "'");
    } else {
      t.alphabet = std::string(1, pattern[i]);
      ++i;
    }
    if (i < pattern.size() && pattern[i] == '{') {
      const auto close = pattern.find('}', i);
      if (close == std::string_view::npos) bad("unterminated repetition");
      try {
        t.repeat = std::stoi(std::string(pattern.substr(i + 1, close - i - 1)));
      } catch (const std::exception&) {
        bad("repetition count is not a number");
      }
      if (t.repeat < 1) bad("repetition count must be positive");
      i = close + 1;
    }
    tokens_.push_back(std::move(t));
  }
  if (tokens_.empty()) bad("pattern is empty");
}

bool IdPattern::matches(std::string_view s) const {
  std::size_t pos = 0;
  for (const auto& t : tokens_) {
    for (int r = 0; r < t.repeat; ++r, ++pos) {
      if (pos >= s.size() || t.alphabet.find(s[pos]) == std::string::npos) return false;
    }
  }
  return pos == s.size();
}

std::string IdPattern::sample(Rng& rng) const {
  std::string out;
  for (const auto& t : tokens_) {
    for (int r = 0; r < t.repeat; ++r) out += t.alphabet[rng.below(t.alphabet.size())];
  }
  return out;
}

double IdPattern::space_size() const {
  double log_size = 0.0;
  for (const auto& t : tokens_) log_size += t.repeat * std::log(static_cast<double>(t.alphabet.size()));
  return log_size > 690.0 ? 1e300 : std::exp(log_size);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::string& pick(const std::vector<std::string>& v, Rng& rng) { return v[rng.below(v.size())]; }

Date random_date_between(const Date& lo, const Date& hi, Rng& rng) {
  return add_days(lo, static_cast<long>(rng.between(0, days_between(lo, hi))));
}

// Issue dates fall in the five years before the reference date; ages at issue span 18-80.
SubjectRecord draw_subject(int id, std::uint64_t base_seed, const CountryConfig& config, const Dictionaries& dicts,
                           const AssetLists& assets, const std::optional<IdPattern>& personal) {
  Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(id)));
  SubjectRecord r;
  r.subject_id = id;
  // Country-independent draws come first so that shared streams agree on them.
  r.sex = rng.coin() ? Sex::Male : Sex::Female;
  r.issue_date = random_date_between(add_years(config.reference_date, -5), config.reference_date, rng);
  const Date oldest = add_days(add_years(r.issue_date, -81), 1);
  const Date youngest = add_years(r.issue_date, -18);
  r.birth_date = random_date_between(oldest, youngest, rng);
  r.expiry_date = add_years(r.issue_date, config.validity_years);
  if (!assets.faces.empty()) r.face_asset = pick(assets.faces, rng);
  if (!assets.signatures.empty()) r.signature_asset = pick(assets.signatures, rng);
  if (!assets.fingerprints.empty()) r.fingerprint_asset = pick(assets.fingerprints, rng);
  r.given_name = pick(dicts.get(r.sex == Sex::Male ? DictionaryCategory::GivenMale : DictionaryCategory::GivenFemale)
                          .entries,
                      rng);
  r.surname = pick(dicts.get(DictionaryCategory::Surname).entries, rng);
  r.birth_place = pick(dicts.get(DictionaryCategory::City).entries, rng);
  r.issuing_authority = pick(dicts.get(DictionaryCategory::Authority).entries, rng);
  r.nationality = config.country_code;
  if (personal) r.personal_number = personal->sample(rng);
  return r;
}

}  // namespace

std::vector<SubjectRecord> generate_subjects(std::size_t n, std::uint64_t seed, const CountryConfig& config,
                                             const Dictionaries& dicts, const AssetLists& assets,
                                             const GenerationOptions& options) {
  if (n == 0) throw GenerationError("generate_subjects: n must be at least 1");
  for (auto c : {DictionaryCategory::GivenMale, DictionaryCategory::GivenFemale, DictionaryCategory::Surname,
                 DictionaryCategory::City, DictionaryCategory::Authority}) {
    dicts.get(c);
  }
  const IdPattern doc_pattern(config.document_number_pattern);
  if (static_cast<double>(n) > doc_pattern.space_size()) {
    throw GenerationError("requested " + std::to_string(n) + " subjects but pattern '" + doc_pattern.source() +
                          "' admits only " + std::to_string(static_cast<long long>(doc_pattern.space_size())) +
                          " document numbers");
  }
  std::optional<IdPattern> personal;
  if (config.personal_number_pattern) personal.emplace(*config.personal_number_pattern);

  const std::uint64_t base = options.shared_across_countries ? seed : derive_seed(seed, fnv1a(config.country_code));
  std::vector<SubjectRecord> out(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const int id = options.first_subject_id + static_cast<int>(i);
    out[static_cast<std::size_t>(i)] = draw_subject(id, base, config, dicts, assets, personal);
  }

  // Document numbers come from their own per-subject stream; a collision re-draws the
  // later subject's number on the next attempt stream, in subject-id order.
  std::unordered_set<std::string> used;
  for (auto& r : out) {
    std::uint64_t attempt = 1;
    do {
      Rng doc_rng(derive_seed(base, static_cast<std::uint64_t>(r.subject_id), attempt++));
      r.document_number = doc_pattern.sample(doc_rng);
    } while (!used.insert(r.document_number).second);
  }
  return out;
}

ValidationReport validate_subject(const SubjectRecord& r, const CountryConfig& config) {
  ValidationReport v;
  const std::string who = "subject " + std::to_string(r.subject_id);
  if (!r.birth_date.ok() || !r.issue_date.ok() || !r.expiry_date.ok()) {
    v.push_back({who, "dates", "record carries an invalid calendar date"});
    return v;
  }
  if (!(r.birth_date < r.issue_date)) v.push_back({who, "birth_date", "birth date must precede the issue date"});
  if (!(r.issue_date < r.expiry_date) || r.expiry_date != add_years(r.issue_date, config.validity_years)) {
    v.push_back({who, "expiry", "expiry date must be the issue date plus " + std::to_string(config.validity_years) +
                                    " years, got " + to_iso(r.expiry_date)});
  }
  if (r.birth_date < r.issue_date && age_on(r.birth_date, r.issue_date) < 18) {
    v.push_back({who, "age_at_issue", "holder is " + std::to_string(age_on(r.birth_date, r.issue_date)) +
                                          " at issue; adult passports need 18"});
  }
  try {
    if (!IdPattern(config.document_number_pattern).matches(r.document_number)) {
      v.push_back({who, "document_number", "'" + r.document_number + "' does not match " +
                                               config.document_number_pattern});
    }
  } catch (const std::invalid_argument& e) {
    v.push_back({who, "document_number", e.what()});
  }
  if (r.given_name.empty()) v.push_back({who, "given_name", "given name is empty"});
  if (r.surname.empty()) v.push_back({who, "surname", "surname is empty"});
  if (r.nationality != config.country_code) {
    v.push_back({who, "nationality", "nationality " + r.nationality + " differs from " + config.country_code});
  }
  return v;
}

std::string to_json_line(const SubjectRecord& r, const std::vector<std::pair<std::string, std::string>>& extra) {
  nlohmann::ordered_json j;
  j["subject_id"] = r.subject_id;
  j["given_name"] = r.given_name;
  j["surname"] = r.surname;
  j["sex"] = std::string(1, sex_code(r.sex));
  j["birth_date"] = to_iso(r.birth_date);
  j["birth_place"] = r.birth_place;
  j["nationality"] = r.nationality;
  j["document_number"] = r.document_number;
  j["issue_date"] = to_iso(r.issue_date);
  j["expiry_date"] = to_iso(r.expiry_date);
  j["issuing_authority"] = r.issuing_authority;
  j["personal_number"] = r.personal_number ? nlohmann::ordered_json(*r.personal_number) : nlohmann::ordered_json(nullptr);
  j["face_asset"] = r.face_asset;
  j["signature_asset"] = r.signature_asset;
  j["fingerprint_asset"] = r.fingerprint_asset ? nlohmann::ordered_json(*r.fingerprint_asset) : nlohmann::ordered_json(nullptr);
  for (const auto& [k, v] : extra) j[k] = v;
  return j.dump();
}

SubjectRecord subject_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    SubjectRecord r;
    r.subject_id = j.at("subject_id").get<int>();
    r.given_name = j.at("given_name").get<std::string>();
    r.surname = j.at("surname").get<std::string>();
    const auto sex = j.at("sex").get<std::string>();
    if (sex != "M" && sex != "F") throw GenerationError("sex must be \"M\" or \"F\"");
    r.sex = sex == "M" ? Sex::Male : Sex::Female;
    r.birth_date = parse_date(j.at("birth_date").get<std::string>());
    r.birth_place = j.at("birth_place").get<std::string>();
    r.nationality = j.at("nationality").get<std::string>();
    r.document_number = j.at("document_number").get<std::string>();
    r.issue_date = parse_date(j.at("issue_date").get<std::string>());
    r.expiry_date = parse_date(j.at("expiry_date").get<std::string>());
    r.issuing_authority = j.at("issuing_authority").get<std::string>();
    if (j.contains("personal_number") && !j["personal_number"].is_null()) {
      r.personal_number = j["personal_number"].get<std::string>();
    }
    r.face_asset = j.value("face_asset", "");
    r.signature_asset = j.value("signature_asset", "");
    if (j.contains("fingerprint_asset") && !j["fingerprint_asset"].is_null()) {
      r.fingerprint_asset = j["fingerprint_asset"].get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw GenerationError(std::string("subject record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw GenerationError(std::string("subject record: ") + e.what());
  }
}

}  // namespace synthpass
