#pragma once

// Presentation-attack-detection error rates over labelled score sets.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "synthpass/core/labels.hpp"

namespace synthpass {

enum class Polarity { HigherIsAttack, LowerIsAttack };

struct ScoreEntry {
  std::string path;
  double score = 0.0;
  Label label = Label::BonaFide;
  Pai pai = Pai::None;
};

/// Scores are stored oriented so that higher means attack. Files declaring
/// `polarity=lower` are negated on load and `polarity` records that.
struct ScoreSet {
  std::vector<ScoreEntry> entries;
  Polarity polarity = Polarity::HigherIsAttack;

  std::size_t count(Pai pai) const;
  std::size_t bona_fide_count() const { return count(Pai::None); }
  /// Attack instruments present, in enum order.
  std::vector<Pai> pais() const;
  /// Converts an oriented threshold back to the file's score scale.
  double to_file_scale(double threshold) const {
    return polarity == Polarity::HigherIsAttack ? threshold : -threshold;
  }
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScoreFileError : public MetricsError {
 public:
  ScoreFileError(std::size_t line, const std::string& what)
      : MetricsError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Comma-separated `path,label,pai,score` with header. An optional first line
/// `polarity=higher` or `polarity=lower` names which end of the scale means attack.
/// Requires both classes to be present.
ScoreSet parse_scores(std::istream& in);
ScoreSet read_scores(const std::filesystem::path& path);
void write_scores(std::ostream& out, const ScoreSet& s);

/// Which attacks a curve is built from: one instrument, or the maximum APCER over all of them.
struct WorstCase {};
using PaiSelector = std::variant<Pai, WorstCase>;

std::string describe(const PaiSelector& sel);

/// Fraction of attacks of `pai` classified bona fide (score < threshold).
double apcer(const ScoreSet& s, Pai pai, double threshold);
/// Max over present instruments.
double apcer_worst(const ScoreSet& s, double threshold);
/// Fraction of bona fide entries classified attack (score >= threshold).
double bpcer(const ScoreSet& s, double threshold);

struct DetPoint {
  double apcer = 0.0;
  double bpcer = 0.0;
  double threshold = 0.0;

  bool operator==(const DetPoint&) const = default;
};

/// One point per candidate threshold, in ascending threshold order: -inf, the midpoints
/// between consecutive distinct scores, +inf.
std::vector<DetPoint> det_curve(const ScoreSet& s, const PaiSelector& sel = WorstCase{});

struct EerResult {
  double rate = 0.0;
  double threshold = 0.0;
};

/// Crossing of APCER and BPCER on the DET polyline, linearly interpolated between the
/// bracketing points. The threshold is interpolated the same way when both ends are finite.
EerResult eer(const ScoreSet& s, const PaiSelector& sel = WorstCase{});
EerResult eer_from_curve(const std::vector<DetPoint>& curve);

struct OperatingPoint {
  double level = 0.0;
  double bpcer = 0.0;
  double apcer = 0.0;
  double threshold = 0.0;
  /// False when the attack count cannot resolve an APCER of `level` (N * level < 1).
  bool attainable = true;
};

inline const std::vector<double> kStandardApcerLevels = {0.10, 0.05, 0.01};

/// For each level: the DET point with the largest APCER <= level (lowest BPCER on ties).
std::vector<OperatingPoint> bpcer_at_apcer(const ScoreSet& s, const std::vector<double>& levels = kStandardApcerLevels,
                                           const PaiSelector& sel = WorstCase{});

struct PadMetrics {
  PaiSelector selector = WorstCase{};
  EerResult eer;
  std::vector<OperatingPoint> operating_points;
  /// APCER per instrument at the EER threshold.
  std::map<Pai, double> apcer_per_pai;
  double bpcer_at_eer_threshold = 0.0;
  std::vector<DetPoint> det_points;
  std::size_t bona_fide = 0;
  std::map<Pai, std::size_t> attacks;
};

PadMetrics evaluate(const ScoreSet& s, const PaiSelector& sel = WorstCase{});

/// Human-readable summary: counts, EER, BPCER10/20/100, per-PAI APCER table.
void write_report(std::ostream& out, const ScoreSet& s, const PadMetrics& m);
/// Machine-readable summary with the same content (thresholds on the file's scale).
std::string report_json(const ScoreSet& s, const PadMetrics& m);
/// `apcer,bpcer,threshold,apcer_probit,bpcer_probit` rows; probits are standard normal
/// quantiles with rates clamped to [1e-6, 1 - 1e-6].
void write_det(std::ostream& out, const ScoreSet& s, const std::vector<DetPoint>& det);

}  // namespace synthpass
