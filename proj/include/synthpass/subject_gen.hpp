#pragma once

// Synthetic subject records drawn from per-country dictionaries.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synthpass/core/date.hpp"
#include "synthpass/core/report.hpp"
#include "synthpass/core/rng.hpp"
#include "synthpass/template_model.hpp"

namespace synthpass {

enum class Sex { Male, Female };

char sex_code(Sex s);

struct SubjectRecord {
  int subject_id = 0;
  std::string given_name;
  std::string surname;
  Sex sex = Sex::Female;
  Date birth_date{};
  std::string birth_place;
  std::string nationality;
  std::string document_number;
  Date issue_date{};
  Date expiry_date{};
  std::string issuing_authority;
  std::optional<std::string> personal_number;
  std::string face_asset;
  std::string signature_asset;
  std::optional<std::string> fingerprint_asset;

  bool operator==(const SubjectRecord&) const = default;
};

enum class DictionaryCategory { GivenMale, GivenFemale, Surname, City, Authority };

std::string_view to_string(DictionaryCategory c);

struct Dictionary {
  DictionaryCategory category = DictionaryCategory::Surname;
  std::vector<std::string> entries;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One entry per line, UTF-8. Blank lines and lines starting with '#' are skipped;
/// duplicates are dropped keeping the first occurrence.
Dictionary load_dictionary(const std::filesystem::path& path, DictionaryCategory category);
Dictionary make_dictionary(DictionaryCategory category, const std::vector<std::string>& entries);

struct Dictionaries {
  std::map<DictionaryCategory, Dictionary> by_category;

  const Dictionary& get(DictionaryCategory c) const;
  void add(Dictionary d) { by_category[d.category] = std::move(d); }
};

Dictionaries load_dictionaries(const CountryConfig& config);

/// Asset references assigned to subjects at random (with replacement).
struct AssetLists {
  std::vector<std::string> faces;
  std::vector<std::string> signatures;
  std::vector<std::string> fingerprints;
};

/// Regex-like identifier pattern: literal characters, classes such as [A-Z] or [0-9A-F],
/// and {n} repetition counts, e.g. "[A-Z]{2}[0-9]{7}".
class IdPattern {
 public:
  explicit IdPattern(std::string_view pattern);

  bool matches(std::string_view s) const;
  std::string sample(Rng& rng) const;
  /// Number of distinct strings the pattern admits (saturates at ~1e300).
  double space_size() const;
  const std::string& source() const { return source_; }

 private:
  struct Token {
    std::string alphabet;
    int repeat = 1;
  };
  std::string source_;
  std::vector<Token> tokens_;
};

struct GenerationOptions {
  int first_subject_id = 1;
  /// When set, per-subject streams ignore the country code so the same subject ids draw
  /// the same sex, dates and asset picks in every country.
  bool shared_across_countries = false;
};

/// Pure function of its inputs. Record i uses an RNG stream derived from (seed, subject id);
/// document-number collisions are resolved by re-drawing later subjects on a new stream.
std::vector<SubjectRecord> generate_subjects(std::size_t n, std::uint64_t seed, const CountryConfig& config,
                                             const Dictionaries& dicts, const AssetLists& assets = {},
                                             const GenerationOptions& options = {});

ValidationReport validate_subject(const SubjectRecord& record, const CountryConfig& config);

/// One JSON object, fields in declaration order, dates as YYYY-MM-DD, absent optionals as null.
/// `extra` string fields are appended after the record fields.
std::string to_json_line(const SubjectRecord& record,
                         const std::vector<std::pair<std::string, std::string>>& extra = {});
/// Inverse of to_json_line; unknown keys are ignored. Throws GenerationError.
SubjectRecord subject_from_json(std::string_view line);

}  // namespace synthpass
