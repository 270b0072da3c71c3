#include "synthpass/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "synthpass/core/csv.hpp"
#include "synthpass/core/rng.hpp"

namespace synthpass {

namespace {

const std::vector<std::string> kColumns = {"path", "country", "subject_id", "label", "pai", "note"};

using SubjectKey = std::pair<std::string, int>;

SubjectKey key_of(const ManifestEntry& e) { return {e.country, e.subject_id}; }

// Sorted subject keys, shuffled by the seed.
std::vector<SubjectKey> shuffled_subjects(const Manifest& m, std::uint64_t seed) {
  std::set<SubjectKey> keys;
  for (const auto& e : m) keys.insert(key_of(e));
  std::vector<SubjectKey> out(keys.begin(), keys.end());
  Rng rng(seed);
  rng.shuffle(out);
  return out;
}

// Distributes entries into partitions according to their subject's assignment.
std::vector<Manifest> distribute(const Manifest& m, const std::vector<SubjectKey>& order,
                                 const std::vector<std::size_t>& counts) {
  std::map<SubjectKey, std::size_t> part;
  std::size_t i = 0;
  for (std::size_t p = 0; p < counts.size(); ++p) {
    for (std::size_t c = 0; c < counts[p]; ++c) part[order[i++]] = p;
  }
  std::vector<Manifest> out(counts.size());
  for (const auto& e : m) out[part.at(key_of(e))].push_back(e);
  return out;
}

}  // namespace

Manifest parse_manifest(std::istream& in, const std::string& source) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::read_rows(in);
  } catch (const csv::ParseError& e) {
    throw ManifestError(source + ":" + std::to_string(e.line()) + ": malformed record");
  }
  auto fail = [&](std::size_t line, const std::string& what) -> ManifestError {
    return ManifestError(source + ":" + std::to_string(line) + ": " + what);
  };
  if (rows.empty()) throw fail(1, "missing header row");
  const auto& header = rows.front().fields;
  const bool has_note = header.size() == kColumns.size();
  if (!(header.size() == kColumns.size() || header.size() == kColumns.size() - 1) ||
      !std::equal(header.begin(), header.end(), kColumns.begin())) {
    throw fail(rows.front().line, "expected header '" + std::string(kManifestHeader) + "' (note optional)");
  }
  Manifest m;
  std::unordered_set<std::string> paths;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, f] = rows[r];
    if (f.size() != header.size()) {
      throw fail(line, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    ManifestEntry e;
    e.path = f[0];
    e.country = f[1];
    if (e.path.empty()) throw fail(line, "empty path");
    if (e.country.size() != 3) throw fail(line, "country '" + e.country + "' is not an alpha-3 code");
    std::size_t used = 0;
    try {
      e.subject_id = std::stoi(f[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != f[2].size()) throw fail(line, "subject_id '" + f[2] + "' is not an integer");
    const auto label = parse_label(f[3]);
    const auto pai = parse_pai(f[4]);
    if (!label) throw fail(line, "unknown label '" + f[3] + "'");
    if (!pai) throw fail(line, "unknown pai '" + f[4] + "'");
    if (!consistent(*label, *pai)) throw fail(line, "bona fide entries must have pai 'none' and attacks must not");
    e.label = *label;
    e.pai = *pai;
    if (has_note) e.note = f[5];
    if (!paths.insert(e.path).second) throw fail(line, "duplicate path '" + e.path + "'");
    m.push_back(std::move(e));
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot open " + path.string());
  return parse_manifest(in, path.string());
}

void write_manifest(std::ostream& out, const Manifest& m) {
  out << kManifestHeader << '\n';
  for (const auto& e : m) {
    out << csv::join({e.path, e.country, std::to_string(e.subject_id), std::string(to_string(e.label)),
                      std::string(to_string(e.pai)), e.note})
        << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ManifestError("cannot write " + path.string());
  write_manifest(out, m);
}

std::vector<std::size_t> allocate(std::size_t subjects, const std::vector<double>& ratios) {
  const std::size_t k = ratios.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = static_cast<double>(subjects) * ratios[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < subjects; i = (i + 1) % k, ++assigned) ++counts[order[i]];
  for (std::size_t i = 0; i < k; ++i) {
    if (counts[i] > 0 || ratios[i] <= 0.0) continue;
    const auto donor = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    if (counts[donor] <= 1) break;
    --counts[donor];
    ++counts[i];
  }
  return counts;
}

SplitResult split_intra(const Manifest& manifest, SplitRatios ratios, std::uint64_t seed) {
  const std::vector<double> r = {ratios.train, ratios.validation, ratios.test};
  for (double v : r) {
    if (!(v >= 0.0)) throw SplitError("split ratios must be non-negative");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw SplitError("split ratios must sum to 1");
  if (manifest.empty()) throw SplitError("manifest is empty");
  const auto subjects = shuffled_subjects(manifest, seed);
  if (subjects.size() < 3) {
    throw SplitError("intra split needs at least 3 subjects, manifest has " + std::to_string(subjects.size()));
  }
  auto parts = distribute(manifest, subjects, allocate(subjects.size(), r));
  return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

LooSplit split_loo(const Manifest& manifest, const std::string& test_country, Pai test_pai, double val_fraction,
                   std::uint64_t seed) {
  if (test_pai == Pai::None) throw SplitError("leave-one-out test PAI must be an attack instrument");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw SplitError("val_fraction must lie in [0, 1)");
  LooSplit out;
  Manifest rest;
  bool country_seen = false;
  for (const auto& e : manifest) {
    if (e.country != test_country) {
      rest.push_back(e);
      continue;
    }
    country_seen = true;
    if (e.label == Label::BonaFide || e.pai == test_pai) {
      out.split.test.push_back(e);
    } else {
      out.excluded.push_back(e);
    }
  }
  if (!country_seen) throw SplitError("test country '" + test_country + "' does not occur in the manifest");
  if (rest.empty()) throw SplitError("leave-one-out needs at least one country besides '" + test_country + "'");
  if (out.split.test.empty()) throw SplitError("test set is empty");

  const auto subjects = shuffled_subjects(rest, seed);
  auto parts = distribute(rest, subjects, allocate(subjects.size(), {1.0 - val_fraction, val_fraction}));
  out.split.train = std::move(parts[0]);
  out.split.validation = std::move(parts[1]);
  return out;
}

}  // namespace synthpass
