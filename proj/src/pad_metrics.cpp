#include "synthpass/pad_metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "synthpass/core/csv.hpp"
#include "synthpass/core/text_util.hpp"

namespace synthpass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_both_classes(const ScoreSet& s) {
  if (s.bona_fide_count() == 0) throw MetricsError("score set has no bona fide entries");
  if (s.entries.size() == s.bona_fide_count()) throw MetricsError("score set has no attack entries");
}

std::vector<Pai> selected_pais(const ScoreSet& s, const PaiSelector& sel) {
  if (const Pai* p = std::get_if<Pai>(&sel)) {
    if (*p == Pai::None) throw MetricsError("bona fide is not an attack instrument");
    if (s.count(*p) == 0) throw MetricsError("score set has no '" + std::string(to_string(*p)) + "' attacks");
    return {*p};
  }
  return s.pais();
}

// Midpoint strictly above a, at most b.
double midpoint(double a, double b) {
  const double m = a / 2 + b / 2;
  return m > a ? m : b;
}

double parse_double(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ScoreFileError(line, "score '" + text + "' is not a decimal number");
  }
  if (!std::isfinite(v)) throw ScoreFileError(line, "score '" + text + "' is not finite");
  return v;
}

}  // namespace

std::size_t ScoreSet::count(Pai pai) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const ScoreEntry& e) { return e.pai == pai; }));
}

std::vector<Pai> ScoreSet::pais() const {
  std::vector<Pai> out;
  for (Pai p : {Pai::Print, Pai::Screen}) {
    if (count(p) > 0) out.push_back(p);
  }
  return out;
}

std::string describe(const PaiSelector& sel) {
  if (const Pai* p = std::get_if<Pai>(&sel)) return std::string(to_string(*p));
  return "worst-case";
}

ScoreSet parse_scores(std::istream& in) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::read_rows(in);
  } catch (const csv::ParseError& e) {
    throw ScoreFileError(e.line(), "malformed record");
  }
  if (rows.empty()) throw ScoreFileError(1, "score file is empty");
  ScoreSet s;
  std::size_t r = 0;
  if (rows[0].fields.size() == 1 && rows[0].fields[0].rfind("polarity=", 0) == 0) {
    const std::string v = trim(rows[0].fields[0].substr(9));
    if (v == "higher") {
      s.polarity = Polarity::HigherIsAttack;
    } else if (v == "lower") {
      s.polarity = Polarity::LowerIsAttack;
    } else {
      throw ScoreFileError(rows[0].line, "polarity must be 'higher' or 'lower', got '" + v + "'");
    }
    ++r;
  }
  if (r >= rows.size()) throw ScoreFileError(rows.back().line + 1, "missing header 'path,label,pai,score'");
  const std::vector<std::string> header = {"path", "label", "pai", "score"};
  if (rows[r].fields != header) throw ScoreFileError(rows[r].line, "expected header 'path,label,pai,score'");
  for (++r; r < rows.size(); ++r) {
    const auto& [line, f] = rows[r];
    if (f.size() != 4) throw ScoreFileError(line, "expected 4 fields, got " + std::to_string(f.size()));
    const auto label = parse_label(f[1]);
    const auto pai = parse_pai(f[2]);
    if (!label) throw ScoreFileError(line, "unknown label '" + f[1] + "'");
    if (!pai) throw ScoreFileError(line, "unknown pai '" + f[2] + "'");
    if (!consistent(*label, *pai)) {
      throw ScoreFileError(line, "bona fide rows need pai 'none' and attack rows an instrument");
    }
    double score = parse_double(f[3], line);
    if (s.polarity == Polarity::LowerIsAttack) score = -score;
    s.entries.push_back({f[0], score, *label, *pai});
  }
  require_both_classes(s);
  return s;
}

ScoreSet read_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MetricsError("cannot open " + path.string());
  try {
    return parse_scores(in);
  } catch (const MetricsError& e) {
    throw MetricsError(path.string() + ": " + e.what());
  }
}

void write_scores(std::ostream& out, const ScoreSet& s) {
  if (s.polarity == Polarity::LowerIsAttack) out << "polarity=lower\n";
  out << "path,label,pai,score\n";
  char buf[32];
  for (const auto& e : s.entries) {
    const auto res = std::to_chars(buf, buf + sizeof buf, s.to_file_scale(e.score));
    out << csv::join({e.path, std::string(to_string(e.label)), std::string(to_string(e.pai)),
                      std::string(buf, res.ptr)})
        << '\n';
  }
}

double apcer(const ScoreSet& s, Pai pai, double threshold) {
  if (pai == Pai::None) throw MetricsError("bona fide is not an attack instrument");
  std::size_t n = 0;
  std::size_t missed = 0;
  for (const auto& e : s.entries) {
    if (e.pai != pai) continue;
    ++n;
    if (e.score < threshold) ++missed;
  }
  if (n == 0) throw MetricsError("score set has no '" + std::string(to_string(pai)) + "' attacks");
  return static_cast<double>(missed) / static_cast<double>(n);
}

double apcer_worst(const ScoreSet& s, double threshold) {
  const auto pais = s.pais();
  if (pais.empty()) throw MetricsError("score set has no attack entries");
  double worst = 0.0;
  for (Pai p : pais) worst = std::max(worst, apcer(s, p, threshold));
  return worst;
}

double bpcer(const ScoreSet& s, double threshold) {
  std::size_t n = 0;
  std::size_t rejected = 0;
  for (const auto& e : s.entries) {
    if (e.label != Label::BonaFide) continue;
    ++n;
    if (e.score >= threshold) ++rejected;
  }
  if (n == 0) throw MetricsError("score set has no bona fide entries");
  return static_cast<double>(rejected) / static_cast<double>(n);
}

std::vector<DetPoint> det_curve(const ScoreSet& s, const PaiSelector& sel) {
  require_both_classes(s);
  const auto pais = selected_pais(s, sel);

  std::vector<double> values;
  values.reserve(s.entries.size());
  for (const auto& e : s.entries) values.push_back(e.score);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t m = values.size();

  // counts[k][j]: entries of class k whose score is values[j]. Class 0 is bona fide.
  std::vector<std::vector<std::size_t>> counts(pais.size() + 1, std::vector<std::size_t>(m, 0));
  std::vector<std::size_t> totals(pais.size() + 1, 0);
  for (const auto& e : s.entries) {
    std::size_t k = 0;
    if (e.label == Label::Attack) {
      const auto it = std::find(pais.begin(), pais.end(), e.pai);
      if (it == pais.end()) continue;
      k = 1 + static_cast<std::size_t>(it - pais.begin());
    }
    const auto j = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), e.score) - values.begin());
    ++counts[k][j];
    ++totals[k];
  }

  // At threshold index j every value below index j is classified bona fide.
  std::vector<DetPoint> curve;
  curve.reserve(m + 1);
  std::vector<std::size_t> below(pais.size() + 1, 0);
  for (std::size_t j = 0; j <= m; ++j) {
    if (j > 0) {
      for (std::size_t k = 0; k < below.size(); ++k) below[k] += counts[k][j - 1];
    }
    DetPoint p;
    p.threshold = j == 0 ? -kInf : j == m ? kInf : midpoint(values[j - 1], values[j]);
    p.bpcer = static_cast<double>(totals[0] - below[0]) / static_cast<double>(totals[0]);
    for (std::size_t k = 1; k < below.size(); ++k) {
      p.apcer = std::max(p.apcer, static_cast<double>(below[k]) / static_cast<double>(totals[k]));
    }
    curve.push_back(p);
  }
  return curve;
}

EerResult eer_from_curve(const std::vector<DetPoint>& curve) {
  if (curve.empty()) throw MetricsError("empty DET curve");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = curve[i].apcer - curve[i].bpcer;
    if (d < 0.0) continue;
    if (d == 0.0 || i == 0) return {curve[i].apcer, curve[i].threshold};
    const DetPoint& a = curve[i - 1];
    const DetPoint& b = curve[i];
    const double da = a.apcer - a.bpcer;
    const double alpha = -da / (d - da);
    EerResult r;
    r.rate = a.apcer + alpha * (b.apcer - a.apcer);
    const bool fa = std::isfinite(a.threshold);
    const bool fb = std::isfinite(b.threshold);
    if (fa && fb) {
      r.threshold = a.threshold + alpha * (b.threshold - a.threshold);
    } else if (fa || fb) {
      r.threshold = fa ? a.threshold : b.threshold;
    } else {
      r.threshold = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  }
  throw MetricsError("DET curve never reaches APCER >= BPCER");
}

EerResult eer(const ScoreSet& s, const PaiSelector& sel) { return eer_from_curve(det_curve(s, sel)); }

std::vector<OperatingPoint> bpcer_at_apcer(const ScoreSet& s, const std::vector<double>& levels,
                                           const PaiSelector& sel) {
  const auto curve = det_curve(s, sel);
  std::size_t n_min = std::numeric_limits<std::size_t>::max();
  for (Pai p : selected_pais(s, sel)) n_min = std::min(n_min, s.count(p));

  std::vector<OperatingPoint> out;
  for (double level : levels) {
    if (!(level >= 0.0 && level <= 1.0)) throw MetricsError("APCER level must lie in [0, 1]");
    const DetPoint* best = nullptr;
    for (const auto& p : curve) {
      if (p.apcer > level) continue;
      if (!best || p.apcer > best->apcer || (p.apcer == best->apcer && p.bpcer < best->bpcer)) best = &p;
    }
    // The -inf point always has APCER 0, so `best` is set.
    OperatingPoint op;
    op.level = level;
    op.apcer = best->apcer;
    op.bpcer = best->bpcer;
    op.threshold = best->threshold;
    op.attainable = static_cast<double>(n_min) * level >= 1.0 - 1e-12;
    out.push_back(op);
  }
  return out;
}

PadMetrics evaluate(const ScoreSet& s, const PaiSelector& sel) {
  PadMetrics m;
  m.selector = sel;
  m.det_points = det_curve(s, sel);
  m.eer = eer_from_curve(m.det_points);
  m.operating_points = bpcer_at_apcer(s, kStandardApcerLevels, sel);
  m.bona_fide = s.bona_fide_count();
  for (Pai p : s.pais()) {
    m.attacks[p] = s.count(p);
    if (!std::isnan(m.eer.threshold)) m.apcer_per_pai[p] = apcer(s, p, m.eer.threshold);
  }
  if (!std::isnan(m.eer.threshold)) m.bpcer_at_eer_threshold = bpcer(s, m.eer.threshold);
  return m;
}

namespace {

const char* level_name(double level) {
  if (level == 0.10) return "BPCER10";
  if (level == 0.05) return "BPCER20";
  if (level == 0.01) return "BPCER100";
  return nullptr;
}

std::string level_label(double level) {
  if (const char* n = level_name(level)) return n;
  std::ostringstream os;
  os << "BPCER@APCER=" << level;
  return os.str();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

nlohmann::ordered_json threshold_json(const ScoreSet& s, double t) {
  if (std::isnan(t)) return nullptr;
  if (std::isinf(t)) return (s.to_file_scale(t) > 0) ? "+inf" : "-inf";
  return s.to_file_scale(t);
}

}  // namespace

void write_report(std::ostream& out, const ScoreSet& s, const PadMetrics& m) {
  out << "PAD evaluation (" << describe(m.selector) << ")\n";
  out << "decision: attack if score " << (s.polarity == Polarity::HigherIsAttack ? ">=" : "<=") << " threshold\n";
  out << "bona fide: " << m.bona_fide << '\n';
  for (const auto& [pai, n] : m.attacks) out << "attacks " << to_string(pai) << ": " << n << '\n';
  out << "EER: " << fmt(100.0 * m.eer.rate, 4) << " %  (threshold " << fmt(s.to_file_scale(m.eer.threshold))
      << ")\n";
  for (const auto& op : m.operating_points) {
    out << level_label(op.level) << ": " << fmt(100.0 * op.bpcer, 4) << " %  (APCER " << fmt(100.0 * op.apcer, 4)
        << " %, threshold " << fmt(s.to_file_scale(op.threshold)) << ")";
    if (!op.attainable) out << "  [not attainable: too few attack samples]";
    out << '\n';
  }
  out << "APCER per PAI at EER threshold:\n";
  for (const auto& [pai, rate] : m.apcer_per_pai) out << "  " << to_string(pai) << ": " << fmt(100.0 * rate, 4) << " %\n";
  out << "BPCER at EER threshold: " << fmt(100.0 * m.bpcer_at_eer_threshold, 4) << " %\n";
}

std::string report_json(const ScoreSet& s, const PadMetrics& m) {
  nlohmann::ordered_json j;
  j["pai_mode"] = describe(m.selector);
  j["polarity"] = s.polarity == Polarity::HigherIsAttack ? "higher" : "lower";
  j["bona_fide"] = m.bona_fide;
  for (const auto& [pai, n] : m.attacks) j["attacks"][std::string(to_string(pai))] = n;
  j["eer"] = m.eer.rate;
  j["eer_threshold"] = threshold_json(s, m.eer.threshold);
  auto& ops = j["bpcer_at_apcer"] = nlohmann::ordered_json::array();
  for (const auto& op : m.operating_points) {
    ops.push_back({{"name", level_label(op.level)},
                   {"level", op.level},
                   {"bpcer", op.bpcer},
                   {"apcer", op.apcer},
                   {"threshold", threshold_json(s, op.threshold)},
                   {"attainable", op.attainable}});
  }
  for (const auto& [pai, rate] : m.apcer_per_pai) j["apcer_per_pai_at_eer"][std::string(to_string(pai))] = rate;
  j["bpcer_at_eer_threshold"] = m.bpcer_at_eer_threshold;
  j["det_points"] = m.det_points.size();
  return j.dump(2);
}

void write_det(std::ostream& out, const ScoreSet& s, const std::vector<DetPoint>& det) {
  const boost::math::normal standard;
  auto probit = [&](double p) { return boost::math::quantile(standard, std::clamp(p, 1e-6, 1.0 - 1e-6)); };
  out << "apcer,bpcer,threshold,apcer_probit,bpcer_probit\n";
  out.precision(17);
  for (const auto& p : det) {
    const double t = s.to_file_scale(p.threshold);
    out << p.apcer << ',' << p.bpcer << ',';
    if (std::isinf(t)) {
      out << (t > 0 ? "inf" : "-inf");
    } else {
      out << t;
    }
    out << ',' << probit(p.apcer) << ',' << probit(p.bpcer) << '\n';
  }
}

}  // namespace synthpass
