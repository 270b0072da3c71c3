#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "metrics_support.hpp"

using namespace synthpass;
using testsupport::oracle_apcer;
using testsupport::oracle_bpcer;

namespace {

ScoreSet make(const std::vector<double>& bona, const std::vector<double>& print, const std::vector<double>& screen = {}) {
  ScoreSet s;
  int i = 0;
  for (double v : bona) s.entries.push_back({"b" + std::to_string(i++), v, Label::BonaFide, Pai::None});
  for (double v : print) s.entries.push_back({"p" + std::to_string(i++), v, Label::Attack, Pai::Print});
  for (double v : screen) s.entries.push_back({"s" + std::to_string(i++), v, Label::Attack, Pai::Screen});
  return s;
}

ScoreSet parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scores(in);
}

// Inverse of the normal CDF by bisection, independent of the library quantile.
double probit(double p) {
  double lo = -10.0;
  double hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace

TEST_CASE("APCER counts attacks scored below the threshold") {
  const ScoreSet s = make({0.1, 0.2}, {0.6, 0.7, 0.8, 0.9});
  CHECK(apcer(s, Pai::Print, 0.5) == 0.0);
  CHECK(apcer(s, Pai::Print, 0.65) == 0.25);
  CHECK(apcer(s, Pai::Print, 0.95) == 1.0);
  // Ties at the threshold are attacks.
  CHECK(apcer(s, Pai::Print, 0.6) == 0.0);
  CHECK(apcer(s, Pai::Print, 0.65) == oracle_apcer(s, Pai::Print, 0.65));
  CHECK_THROWS_AS(apcer(s, Pai::Screen, 0.5), MetricsError);
  CHECK_THROWS_AS(apcer(s, Pai::None, 0.5), MetricsError);
}

TEST_CASE("BPCER counts bona fide scored at or above the threshold") {
  const ScoreSet s = make({0.1, 0.2, 0.3, 0.4, 0.5}, {0.9});
  CHECK(bpcer(s, 0.0) == 1.0);
  CHECK(bpcer(s, 0.45) == doctest::Approx(0.2));
  CHECK(bpcer(s, 0.45) == oracle_bpcer(s, 0.45));
  CHECK(bpcer(s, 0.5) == doctest::Approx(0.2));
  CHECK(bpcer(s, 1.0) == 0.0);
  CHECK_THROWS_AS(bpcer(make({}, {0.3}), 0.5), MetricsError);
}

TEST_CASE("DET curves of separated and constant scores") {
  const ScoreSet sep = make({0.1, 0.2, 0.3}, {0.7, 0.8}, {0.9});
  const auto det = det_curve(sep);
  bool origin = false;
  for (const auto& p : det) origin = origin || (p.apcer == 0.0 && p.bpcer == 0.0);
  CHECK(origin);
  CHECK(det.size() == 7);
  CHECK(det.front().threshold == -INFINITY);
  CHECK(det.back().threshold == INFINITY);
  CHECK(eer(sep).rate == 0.0);
  for (const auto& op : bpcer_at_apcer(sep)) CHECK(op.bpcer == 0.0);

  const ScoreSet flat = make({0.5, 0.5, 0.5}, {0.5, 0.5});
  const auto two = det_curve(flat);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == DetPoint{0.0, 1.0, -INFINITY});
  CHECK(two[1] == DetPoint{1.0, 0.0, INFINITY});
  // The crossing lies between the infinite sentinels, so it has no finite threshold.
  const EerResult e = eer(flat);
  CHECK(e.rate == doctest::Approx(0.5));
  CHECK(std::isnan(e.threshold));

  CHECK_THROWS_AS(det_curve(make({0.1}, {})), MetricsError);
  CHECK_THROWS_AS(eer(make({}, {0.1})), MetricsError);
  CHECK_THROWS_AS(det_curve(sep, Pai::None), MetricsError);
}

TEST_CASE("a handful of scores reproduces a hand-computed EER") {
  // (APCER, BPCER) along -inf, 0.15, 0.25, 0.35, 0.45, +inf:
  // (0,1) (0,2/3) (1/2,2/3) (1/2,1/3) (1,1/3) (1,0).
  const ScoreSet s = make({0.1, 0.3, 0.5}, {0.2, 0.4});
  const auto det = det_curve(s, Pai::Print);
  REQUIRE(det.size() == 6);
  const double thresholds[] = {-INFINITY, 0.15, 0.25, 0.35, 0.45, INFINITY};
  for (std::size_t i = 0; i < det.size(); ++i) {
    CHECK(testsupport::close(det[i].threshold, thresholds[i], 1e-12));
    CHECK(det[i].apcer == oracle_apcer(s, Pai::Print, det[i].threshold));
    CHECK(det[i].bpcer == oracle_bpcer(s, det[i].threshold));
  }
  // APCER 0.5 meets BPCER 2/3 then 1/3 at 0.25 -> 0.35: d goes from -1/6 to +1/6, crossing halfway.
  const EerResult e = eer(s, Pai::Print);
  CHECK(e.rate == doctest::Approx(0.5));
  CHECK(e.threshold == doctest::Approx(0.3));
}

TEST_CASE("50 random scores match an exhaustive per-threshold recount") {
  for (std::uint32_t seed = 100; seed < 160; ++seed) {
    const ScoreSet s = testsupport::random_score_set(seed);
    const auto bad = testsupport::compare_to_oracle(s, WorstCase{}, 1e-12);
    CHECK_MESSAGE(bad.empty(), "seed " << seed << ": " << (bad.empty() ? "" : bad.front()));
    const auto bad_print = testsupport::compare_to_oracle(s, Pai::Print, 1e-12);
    CHECK_MESSAGE(bad_print.empty(), "seed " << seed << " print");
  }
}

TEST_CASE("operating points pick the largest APCER within the level and flag unreachable levels") {
  // 20 attacks: 1% is below one attack's worth of APCER.
  std::vector<double> bona;
  std::vector<double> attacks;
  for (int i = 0; i < 50; ++i) bona.push_back(i / 100.0);
  for (int i = 0; i < 20; ++i) attacks.push_back(0.3 + i / 50.0);
  const ScoreSet s = make(bona, attacks);
  const auto ops = bpcer_at_apcer(s);
  REQUIRE(ops.size() == 3);
  CHECK(ops[0].level == 0.10);
  CHECK(ops[0].apcer == doctest::Approx(0.10));
  CHECK(ops[1].apcer == doctest::Approx(0.05));
  CHECK(ops[0].attainable);
  CHECK(ops[1].attainable);
  CHECK_FALSE(ops[2].attainable);
  CHECK(ops[2].apcer == 0.0);
  for (const auto& op : ops) {
    CHECK(op.apcer <= op.level);
    CHECK(op.bpcer == oracle_bpcer(s, op.threshold));
  }
  // With 100 attacks the 1% level is exactly resolvable.
  for (int i = 0; i < 80; ++i) attacks.push_back(0.9 + i / 1000.0);
  CHECK(bpcer_at_apcer(make(bona, attacks))[2].attainable);
}

TEST_CASE("identically distributed classes give an EER near one half") {
  std::mt19937 gen(21);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> a;
  std::vector<double> b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(d(gen));
    b.push_back(d(gen));
  }
  // Standard error of a rate over 20000 draws is about 0.0035.
  CHECK(std::abs(eer(make(a, b)).rate - 0.5) < 0.02);
}

TEST_CASE("rates are monotone in the threshold and worst case dominates") {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    const ScoreSet s = testsupport::random_score_set(seed);
    const auto det = det_curve(s);
    for (std::size_t i = 1; i < det.size(); ++i) {
      REQUIRE(det[i].apcer >= det[i - 1].apcer);
      REQUIRE(det[i].bpcer <= det[i - 1].bpcer);
      REQUIRE(det[i].threshold > det[i - 1].threshold);
    }
    for (const auto& p : det) {
      REQUIRE(p.apcer >= 0.0);
      REQUIRE(p.apcer <= 1.0);
      for (Pai pai : s.pais()) REQUIRE(p.apcer >= apcer(s, pai, p.threshold));
      REQUIRE(p.apcer == apcer_worst(s, p.threshold));
    }
  }
}

TEST_CASE("strictly increasing score transforms leave the rates unchanged") {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    const ScoreSet s = testsupport::random_score_set(seed);
    ScoreSet t = s;
    for (auto& e : t.entries) e.score = std::exp(e.score) * 3.0 + 1.0;
    const auto da = det_curve(s);
    const auto db = det_curve(t);
    REQUIRE(da.size() == db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
      CHECK(da[i].apcer == db[i].apcer);
      CHECK(da[i].bpcer == db[i].bpcer);
    }
    CHECK(eer(s).rate == doctest::Approx(eer(t).rate).epsilon(1e-12));
    const auto oa = bpcer_at_apcer(s);
    const auto ob = bpcer_at_apcer(t);
    for (std::size_t i = 0; i < oa.size(); ++i) {
      CHECK(oa[i].bpcer == ob[i].bpcer);
      CHECK(oa[i].apcer == ob[i].apcer);
    }
  }
}

TEST_CASE("fixture score files match the brute-force goldens") {
  const auto bad = testsupport::check_all_goldens(1e-9);
  for (const auto& b : bad) MESSAGE(b);
  CHECK(bad.empty());
}

TEST_CASE("fixture score files match the in-process oracle") {
  for (const auto& name : testsupport::golden_score_files()) {
    const ScoreSet s = read_scores(testsupport::fixtures() / "scores" / (name + ".csv"));
    CHECK_MESSAGE(testsupport::compare_to_oracle(s, WorstCase{}, 1e-12).empty(), name);
    for (Pai p : s.pais()) CHECK_MESSAGE(testsupport::compare_to_oracle(s, p, 1e-12).empty(), name);
  }
}

TEST_CASE("lower-is-attack files are negated on load and reported on their own scale") {
  const ScoreSet s = parse("polarity=lower\npath,label,pai,score\na,bonafide,none,0.9\nb,attack,print,0.1\n");
  CHECK(s.polarity == Polarity::LowerIsAttack);
  CHECK(s.entries[0].score == -0.9);
  CHECK(eer(s).rate == 0.0);
  CHECK(s.to_file_scale(-0.5) == 0.5);
  const auto j = nlohmann::json::parse(report_json(s, evaluate(s)));
  CHECK(j["polarity"] == "lower");
  CHECK(j["eer_threshold"].get<double>() == doctest::Approx(0.5));

  const ScoreSet h = parse("polarity=higher\npath,label,pai,score\na,bonafide,none,0.1\nb,attack,print,0.9\n");
  CHECK(h.polarity == Polarity::HigherIsAttack);
  std::ostringstream out;
  write_scores(out, s);
  const ScoreSet back = parse(out.str());
  CHECK(back.polarity == Polarity::LowerIsAttack);
  CHECK(back.entries[0].score == s.entries[0].score);
}

TEST_CASE("score file errors carry line numbers") {
  const std::string h = "path,label,pai,score\n";
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ScoreFileError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(line_of("") == 1);
  CHECK(line_of("path,score\n") == 1);
  CHECK(line_of("polarity=sideways\n" + h) == 1);
  CHECK(line_of("polarity=lower\n") == 2);
  CHECK(line_of(h + "a,bonafide,none,0.1\nb,attack,print,abc\n") == 3);
  CHECK(line_of(h + "a,bonafide,none,0.1\nb,attack,none,0.3\n") == 3);
  CHECK(line_of(h + "a,bonafide,none,nan\n") == 2);
  CHECK(line_of(h + "a,bonafide,none,0.1,9\n") == 2);
  CHECK(line_of(h + "a,human,none,0.1\n") == 2);
  // Both classes are required.
  CHECK_THROWS_WITH_AS(parse(h + "a,bonafide,none,0.1\n"), doctest::Contains("attack"), MetricsError);
  CHECK_THROWS_AS(read_scores(testsupport::fixtures() / "scores/none.csv"), MetricsError);
}

TEST_CASE("DET export carries probit columns") {
  const ScoreSet s = read_scores(testsupport::fixtures() / "scores/lower_polarity.csv");
  const auto det = det_curve(s);
  std::ostringstream out;
  write_det(out, s, det);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "apcer,bpcer,threshold,apcer_probit,bpcer_probit");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    double v[5];
    std::string cell;
    std::istringstream row(line);
    for (double& x : v) {
      std::getline(row, cell, ',');
      x = std::stod(cell);
    }
    const auto& p = det[rows];
    CHECK(v[0] == p.apcer);
    CHECK(v[1] == p.bpcer);
    if (std::isfinite(p.threshold)) CHECK(v[2] == doctest::Approx(-p.threshold));
    CHECK(v[3] == doctest::Approx(probit(std::clamp(p.apcer, 1e-6, 1 - 1e-6))).epsilon(1e-9));
    CHECK(v[4] == doctest::Approx(probit(std::clamp(p.bpcer, 1e-6, 1 - 1e-6))).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == det.size());
  // Lower-is-attack: the first oriented sentinel -inf is +inf on the file scale.
  CHECK(out.str().find(",inf,") != std::string::npos);
}

TEST_CASE("the text report names every operating point") {
  const ScoreSet s = read_scores(testsupport::fixtures() / "scores/small.csv");
  const PadMetrics m = evaluate(s);
  CHECK(m.bona_fide == 80);
  CHECK(m.attacks.at(Pai::Print) == 40);
  CHECK(m.attacks.at(Pai::Screen) == 30);
  CHECK(m.bpcer_at_eer_threshold == oracle_bpcer(s, m.eer.threshold));
  std::ostringstream out;
  write_report(out, s, m);
  for (const char* key : {"EER", "BPCER10", "BPCER20", "BPCER100", "print", "screen", "not attainable"}) {
    CHECK_MESSAGE(out.str().find(key) != std::string::npos, key);
  }
  CHECK(describe(WorstCase{}) == "worst-case");
  CHECK(describe(Pai::Print) == "print");
}
