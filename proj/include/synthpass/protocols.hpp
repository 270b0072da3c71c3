#pragma once

// Dataset manifests and the intra-dataset / leave-one-out evaluation splits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthpass/core/labels.hpp"

namespace synthpass {

struct ManifestEntry {
  std::string path;
  std::string country;
  int subject_id = 0;
  Label label = Label::BonaFide;
  Pai pai = Pai::None;
  /// Free-form capture remarks (device, operator, ...).
  std::string note;

  bool operator==(const ManifestEntry&) const = default;
};

using Manifest = std::vector<ManifestEntry>;

inline constexpr const char* kManifestHeader = "path,country,subject_id,label,pai,note";

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header row required; the trailing note column is optional. Errors carry "<source>:<line>: ".
Manifest parse_manifest(std::istream& in, const std::string& source = "manifest");
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const Manifest& m);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

struct SplitResult {
  Manifest train;
  Manifest validation;
  Manifest test;
};

class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

/// Partitions subjects, keyed by (country, subject_id), in the given ratios. Subject counts use
/// largest-remainder rounding with at least one subject per partition; entries keep manifest order.
SplitResult split_intra(const Manifest& manifest, SplitRatios ratios = {}, std::uint64_t seed = 0);

struct LooSplit {
  SplitResult split;
  /// Attacks of the test country made with another instrument; in no partition.
  Manifest excluded;
};

/// Test = every bona fide and `test_pai` entry of `test_country`; train/validation = the other
/// countries split by subject, with `val_fraction` of subjects in validation.
LooSplit split_loo(const Manifest& manifest, const std::string& test_country, Pai test_pai,
                   double val_fraction = 0.2, std::uint64_t seed = 0);

/// Subject counts per partition under largest-remainder rounding, each at least 1 when
/// there are enough subjects and the ratio is positive.
std::vector<std::size_t> allocate(std::size_t subjects, const std::vector<double>& ratios);

}  // namespace synthpass
