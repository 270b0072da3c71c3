#pragma once

// Batch commands behind the `synthpass` executable. Each returns a process exit code:
// 0 success, 1 runtime failure, 2 usage error. Diagnostics go to `err`, reports to `out`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "synthpass/face_filter.hpp"

namespace synthpass::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kConfigDirEnv = "SYNTHPASS_CONFIG_DIR";

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

/// Resolves a --config argument: an existing path is used as-is; otherwise it is looked up
/// under $SYNTHPASS_CONFIG_DIR as `<arg>`, `<arg>.json` and `<arg>/config.json`.
std::filesystem::path resolve_config(const std::string& arg);

struct GenerateOptions {
  std::vector<std::string> configs;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  /// 0 picks the OpenMP default.
  int workers = 0;
  double scale = 1.0;
  bool shared_subjects = false;
  int first_subject_id = 1;
  double edge_blur_sigma = 1.5;
  double sensor_noise = 0.0;
};

/// Reads the reproducibility fields back from a receipt written by cmd_generate.
GenerateOptions options_from_receipt(const std::filesystem::path& receipt);

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err);

struct FilterOptions {
  std::filesystem::path faces;
  std::filesystem::path out;
  std::size_t k = 3;
  QualityThresholds thresholds;
  /// Writes ICAO crops of this size instead of copying the selected originals.
  std::optional<std::pair<int, int>> crop;
};

int cmd_filter(const FilterOptions& o, std::ostream& out, std::ostream& err);

struct SplitOptions {
  std::filesystem::path manifest;
  std::string mode;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::vector<double> ratios = {0.6, 0.2, 0.2};
  std::string test_country;
  std::string test_pai;
  double val_fraction = 0.2;
};

int cmd_split(const SplitOptions& o, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
  std::filesystem::path scores;
  /// worst, print or screen.
  std::string pai = "worst";
  std::filesystem::path out;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err);

/// Emits plot-ready DET columns (rates and their probits) for one score file.
int cmd_det(const EvaluateOptions& o, std::ostream& out, std::ostream& err);

struct InspectOptions {
  std::optional<std::string> config;
  std::optional<std::filesystem::path> empty_template_png;
  std::optional<std::filesystem::path> subjects;
  std::vector<std::string> mrz_lines;
};

int cmd_inspect(const InspectOptions& o, std::ostream& out, std::ostream& err);

struct PatternOptions {
  std::filesystem::path image;
  std::string color;
  int tolerance = 30;
  long long min_area = 0;
  int k = 3;
  /// Keep only the n largest components; 0 keeps all above min_area.
  std::size_t components = 0;
  bool snap = false;
  std::filesystem::path out;
};

int cmd_pattern(const PatternOptions& o, std::ostream& out, std::ostream& err);

}  // namespace synthpass::cli
