#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, scratch
// directories and oracles that reimplement the checked arithmetic from scratch.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "synthpass/core/labels.hpp"
#include "synthpass/pad_metrics.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(SYNTHPASS_FIXTURE_DIR); }

/// Removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("synthpass_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// MRZ oracle: value table and 7-3-1 weighting written out independently.

inline int oracle_char_value(char c) {
  static const std::string digits = "0123456789";
  static const std::string letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  if (c == '<') return 0;
  if (auto p = digits.find(c); p != std::string::npos) return static_cast<int>(p);
  if (auto p = letters.find(c); p != std::string::npos) return 10 + static_cast<int>(p);
  return -1;
}

inline int oracle_check_digit(const std::string& s) {
  static const int weights[3] = {7, 3, 1};
  long total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) total += static_cast<long>(oracle_char_value(s[i])) * weights[i % 3];
  return static_cast<int>(total % 10);
}

// ---------------------------------------------------------------------------
// PAD oracle: every rate recounted at every candidate threshold.

struct SweepPoint {
  double apcer, bpcer, threshold;
};

inline std::vector<double> oracle_thresholds(const synthpass::ScoreSet& s) {
  std::vector<double> v;
  for (const auto& e : s.entries) v.push_back(e.score);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> t{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double m = v[i - 1] / 2 + v[i] / 2;
    t.push_back(m <= v[i - 1] ? v[i] : m);
  }
  t.push_back(std::numeric_limits<double>::infinity());
  return t;
}

inline double oracle_apcer(const synthpass::ScoreSet& s, synthpass::Pai pai, double t) {
  long n = 0, miss = 0;
  for (const auto& e : s.entries) {
    if (e.label != synthpass::Label::Attack || e.pai != pai) continue;
    ++n;
    if (!(e.score >= t)) ++miss;
  }
  return static_cast<double>(miss) / static_cast<double>(n);
}

inline double oracle_bpcer(const synthpass::ScoreSet& s, double t) {
  long n = 0, rej = 0;
  for (const auto& e : s.entries) {
    if (e.label != synthpass::Label::BonaFide) continue;
    ++n;
    if (e.score >= t) ++rej;
  }
  return static_cast<double>(rej) / static_cast<double>(n);
}

inline std::vector<synthpass::Pai> oracle_pais(const synthpass::ScoreSet& s) {
  std::vector<synthpass::Pai> out;
  for (auto p : {synthpass::Pai::Print, synthpass::Pai::Screen}) {
    for (const auto& e : s.entries) {
      if (e.label == synthpass::Label::Attack && e.pai == p) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

inline std::vector<SweepPoint> oracle_sweep(const synthpass::ScoreSet& s, const std::vector<synthpass::Pai>& pais) {
  std::vector<SweepPoint> out;
  for (double t : oracle_thresholds(s)) {
    double a = 0.0;
    for (auto p : pais) a = std::max(a, oracle_apcer(s, p, t));
    out.push_back({a, oracle_bpcer(s, t), t});
  }
  return out;
}

/// Crossing of the swept polyline; returns {rate, threshold}.
inline std::pair<double, double> oracle_eer(const std::vector<SweepPoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i].apcer - pts[i].bpcer;
    if (d < 0) continue;
    if (d == 0 || i == 0) return {pts[i].apcer, pts[i].threshold};
    const auto& p = pts[i - 1];
    const double dp = p.apcer - p.bpcer;
    const double w = dp / (dp - d);
    const double rate = p.apcer + w * (pts[i].apcer - p.apcer);
    const bool f0 = std::isfinite(p.threshold), f1 = std::isfinite(pts[i].threshold);
    double th = std::numeric_limits<double>::quiet_NaN();
    if (f0 && f1) th = p.threshold + w * (pts[i].threshold - p.threshold);
    else if (f0) th = p.threshold;
    else if (f1) th = pts[i].threshold;
    return {rate, th};
  }
  return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
}

/// Largest APCER <= level, lowest BPCER among those.
inline SweepPoint oracle_operating_point(const std::vector<SweepPoint>& pts, double level) {
  SweepPoint best{-1, 2, 0};
  for (const auto& p : pts) {
    if (p.apcer > level) continue;
    if (p.apcer > best.apcer || (p.apcer == best.apcer && p.bpcer < best.bpcer)) best = p;
  }
  return best;
}

}  // namespace testsupport
