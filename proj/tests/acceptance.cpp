// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "metrics_support.hpp"
#include "synthpass/cli.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/face_filter.hpp"
#include "synthpass/kernels.hpp"
#include "synthpass/mrz.hpp"
#include "synthpass/protocols.hpp"
#include "synthpass/subject_gen.hpp"

using namespace synthpass;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects the first few problems of a criterion.
struct Problems {
  std::vector<std::string> items;
  void add(const std::string& s) { items.push_back(s); }
  bool empty() const { return items.empty(); }
  std::string summary() const {
    std::string out;
    for (std::size_t i = 0; i < items.size() && i < 3; ++i) out += (i ? "; " : "") + items[i];
    if (items.size() > 3) out += "; +" + std::to_string(items.size() - 3) + " more";
    return out;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 2) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

fs::path country(const std::string& code) { return testsupport::fixtures() / "countries" / code / "config.json"; }

// ---------------------------------------------------------------------------

Outcome mrz_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Problems p;
  if (check_digit("520727") != 3 || testsupport::oracle_check_digit("520727") != 3) p.add("520727 != 3");
  if (check_digit("AB2134<<<") != 5 || testsupport::oracle_check_digit("AB2134<<<") != 5) p.add("AB2134<<< != 5");

  const CountryConfig cfg = load_config(country("POL"));
  const auto subjects = generate_subjects(200, 20240611, cfg, load_dictionaries(cfg));
  auto digit = [](char c) { return c - '0'; };
  for (const auto& s : subjects) {
    const MrzTd3 m = build_td3(s, cfg.country_code);
    const std::string& l = m.line2;
    const std::string id = "subject " + std::to_string(s.subject_id);
    if (m.line1.size() != 44 || l.size() != 44) {
      p.add(id + ": line length");
      continue;
    }
    const std::pair<std::size_t, std::size_t> fields[] = {{0, 9}, {13, 6}, {21, 6}, {28, 14}};
    for (const auto& [at, len] : fields) {
      if (testsupport::oracle_check_digit(l.substr(at, len)) != digit(l[at + len])) {
        p.add(id + ": field check digit at " + std::to_string(at + len));
      }
    }
    const std::string composite = l.substr(0, 10) + l.substr(13, 7) + l.substr(21, 22);
    if (testsupport::oracle_check_digit(composite) != digit(l[43])) p.add(id + ": composite check digit");
    if (!validate_td3(m.line1, m.line2).empty()) p.add(id + ": validate_td3 not clean");
  }
  const double secs = seconds_since(t0);
  if (secs >= 1.0) p.add("runtime " + fmt(secs) + " s");
  return {p.empty(), p.empty() ? "200 subjects, fixed vectors ok, " + fmt(secs, 3) + " s" : p.summary()};
}

Outcome metrics_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Problems p;
  std::size_t largest = 0;
  for (std::uint32_t seed = 1; seed <= 100; ++seed) {
    // Up to 166 entries per class keeps every set at or below 500 entries.
    const ScoreSet s = testsupport::random_score_set(seed * 7919u, 166);
    largest = std::max(largest, s.entries.size());
    std::vector<PaiSelector> selectors{WorstCase{}};
    for (Pai pai : s.pais()) selectors.push_back(pai);
    for (const auto& sel : selectors) {
      for (const auto& b : testsupport::compare_to_oracle(s, sel, 1e-9)) {
        p.add("seed " + std::to_string(seed) + " " + describe(sel) + ": " + b);
      }
      // Direct rate recounts at thresholds between and on the scores.
      for (const auto& e : s.entries) {
        for (double t : {e.score, e.score + 1e-3}) {
          if (std::abs(bpcer(s, t) - testsupport::oracle_bpcer(s, t)) > 1e-9) p.add("bpcer recount");
          for (Pai pai : s.pais()) {
            if (std::abs(apcer(s, pai, t) - testsupport::oracle_apcer(s, pai, t)) > 1e-9) p.add("apcer recount");
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 10.0) p.add("runtime " + fmt(secs) + " s");
  return {p.empty(), p.empty() ? "100 score sets (max " + std::to_string(largest) + " entries), " + fmt(secs) + " s"
                               : p.summary()};
}

Outcome split_exactness() {
  Problems p;
  Manifest m;
  for (const char* c : {"ESP", "POL", "PRT"}) {
    for (int id = 1; id <= 1000; ++id) {
      const std::string stem = std::string(c) + "/" + std::to_string(id);
      m.push_back({"bonafide/" + stem + ".png", c, id, Label::BonaFide, Pai::None, ""});
      m.push_back({"print/" + stem + ".png", c, id, Label::Attack, Pai::Print, ""});
      m.push_back({"screen/" + stem + ".png", c, id, Label::Attack, Pai::Screen, ""});
    }
  }
  const SplitResult r = split_intra(m, {}, 1);
  if (r.train.size() != 5400 || r.validation.size() != 1800 || r.test.size() != 1800) {
    p.add("intra sizes " + std::to_string(r.train.size()) + "/" + std::to_string(r.validation.size()) + "/" +
          std::to_string(r.test.size()));
  }
  std::map<std::pair<std::string, int>, int> owner;
  std::set<std::string> paths;
  int part = 0;
  for (const Manifest* pm : {&r.train, &r.validation, &r.test}) {
    for (const auto& e : *pm) {
      const auto [it, fresh] = owner.emplace(std::make_pair(e.country, e.subject_id), part);
      if (!fresh && it->second != part) p.add("subject in two partitions");
      if (!paths.insert(e.path).second) p.add("path in two partitions");
    }
    ++part;
  }
  if (paths.size() != m.size()) p.add("union differs from input");

  const LooSplit loo = split_loo(m, "POL", Pai::Print, 0.2, 1);
  if (loo.split.test.size() != 2000) p.add("loo test size " + std::to_string(loo.split.test.size()));
  for (const auto& e : loo.split.test) {
    if (e.pai == Pai::Screen) {
      p.add("screen entry in loo test");
      break;
    }
  }
  return {p.empty(), p.empty() ? "intra 5400/1800/1800 subject-disjoint, loo POL/print 2000 with 0 screen"
                               : p.summary()};
}

Outcome determinism(const fs::path& scratch) {
  Problems p;
  cli::GenerateOptions o;
  o.configs = {country("POL").string(), country("ESP").string(), country("PRT").string()};
  o.n = 4;
  o.seed = 31337;
  o.scale = 0.5;
  std::vector<std::pair<std::string, json>> runs;
  for (const auto& [name, workers] : std::vector<std::pair<std::string, int>>{{"w1_a", 1}, {"w1_b", 1}, {"w8", 8}}) {
    o.out = scratch / ("determinism_" + name);
    o.workers = workers;
    std::ostringstream out;
    std::ostringstream err;
    if (cli::cmd_generate(o, out, err) != cli::kOk) {
      p.add(name + ": " + err.str());
      continue;
    }
    json r = json::parse(testsupport::slurp(o.out / "receipt.json"));
    r["manifest_bytes"] = testsupport::slurp(o.out / "manifest.csv");
    runs.emplace_back(name, std::move(r));
  }
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const json& a = runs[0].second;
    const json& b = runs[i].second;
    if (a["manifest_bytes"] != b["manifest_bytes"]) p.add(runs[i].first + ": manifest differs");
    if (a["outputs"]["manifest"] != b["outputs"]["manifest"]) p.add(runs[i].first + ": manifest hash differs");
    if (a["outputs"]["images"] != b["outputs"]["images"]) p.add(runs[i].first + ": image hashes differ");
  }
  std::size_t images = runs.empty() ? 0 : runs[0].second["outputs"]["images"].size();
  if (images != 12) p.add("expected 12 images, got " + std::to_string(images));
  return {p.empty(), p.empty() ? "3 runs (workers 1, 1, 8), 12 identical image hashes and manifests" : p.summary()};
}

Outcome filter_contract() {
  Problems p;
  const fs::path dir = testsupport::fixtures() / "faces";
  const json truth = json::parse(testsupport::slurp(dir / "truth.json"));
  std::map<std::string, std::vector<std::string>> by_subject;
  for (const auto& [name, t] : truth.items()) by_subject[t["subject"].get<std::string>()].push_back(name);

  std::size_t images = 0;
  std::size_t blurred = 0;
  const QualityThresholds thresholds;
  for (auto& [subject, names] : by_subject) {
    std::sort(names.begin(), names.end());
    std::vector<Candidate> cands;
    for (const auto& n : names) {
      const fs::path path = dir / n;
      cands.push_back({read_png(path), SidecarLandmarkProvider::read(SidecarLandmarkProvider::sidecar_path(path)), n});
    }
    images += cands.size();
    const Selection sel = rank_and_select(cands, thresholds, 3);

    // Expected: the three passing candidates with the least synthetic blur.
    std::vector<std::pair<double, std::string>> passing;
    for (const auto& n : names) {
      if (truth[n]["expect"] == "pass") passing.emplace_back(truth[n]["blur_sigma"].get<double>(), n);
    }
    std::sort(passing.begin(), passing.end());
    std::set<std::string> want;
    for (std::size_t i = 0; i < passing.size() && i < 3; ++i) want.insert(passing[i].second);
    std::set<std::string> got;
    for (std::size_t idx : sel.chosen) got.insert(cands[idx].id);
    if (sel.chosen.size() != 3 || got != want) p.add(subject + ": selection differs from the top-3 passing images");

    for (std::size_t i = 0; i < cands.size(); ++i) {
      const std::string expect = truth[names[i]]["expect"];
      const QualityReport& r = sel.reports[i];
      if ((expect == "pass") != r.overall_pass) p.add(names[i] + ": pass/fail differs from truth");
      if (!r.overall_pass) continue;
      const double before = sharpness(cands[i].image, cands[i].landmarks.face_bbox);
      for (double sigma : {0.5, 1.0, 2.0}) {
        const double after = sharpness(kernels::blur(cands[i].image, sigma), cands[i].landmarks.face_bbox);
        if (!(after < before)) p.add(names[i] + ": blur " + fmt(sigma, 1) + " did not lower sharpness");
      }
      ++blurred;
    }
  }
  if (images != 30) p.add("expected 30 fixture images, found " + std::to_string(images));
  return {p.empty(), p.empty() ? std::to_string(images) + " images, top-3 per subject exact, " + std::to_string(blurred) +
                                     " passing images lose sharpness under blur"
                               : p.summary()};
}

Outcome desk_scale(const fs::path& scratch) {
  const auto t0 = std::chrono::steady_clock::now();
  Problems p;
  cli::GenerateOptions o;
  o.configs = {country("POL").string(), country("ESP").string(), country("PRT").string()};
  o.n = 50;
  o.seed = 2024;
  o.scale = 0.5;
  o.out = scratch / "desk";
  std::ostringstream out;
  std::ostringstream err;
  if (cli::cmd_generate(o, out, err) != cli::kOk) p.add(err.str());
  const double secs = seconds_since(t0);
  std::size_t rows = 0;
  if (p.empty()) rows = read_manifest(o.out / "manifest.csv").size();
  if (p.empty() && rows != 150) p.add("manifest has " + std::to_string(rows) + " rows");
  if (secs >= 300.0) p.add("runtime " + fmt(secs) + " s");
  return {p.empty(), p.empty() ? "150 documents at scale 0.5 in " + fmt(secs, 1) + " s" : p.summary()};
}

Outcome goldens_and_invariants() {
  Problems p;
  for (const auto& b : testsupport::check_all_goldens(1e-9)) p.add(b);
  // The invariant suites are the unit test executables built next to this runner.
  for (const char* suite : {"test_pad_metrics", "test_mrz", "test_protocols", "test_compositor"}) {
    const fs::path exe = fs::path(SYNTHPASS_TEST_BIN_DIR) / suite;
    const std::string cmd = "\"" + exe.string() + "\" --minimal > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) p.add(std::string(suite) + " failed");
  }
  return {p.empty(), p.empty() ? "12 golden reports within 1e-9; pad_metrics, mrz, protocols, compositor suites pass"
                               : p.summary()};
}

}  // namespace

int main() {
  testsupport::ScratchDir scratch("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 MRZ correctness", mrz_correctness},
      {"2 metrics oracle equivalence", metrics_oracle},
      {"3 split exactness", split_exactness},
      {"4 generation determinism", [&] { return determinism(scratch.path()); }},
      {"5 filter contract", filter_contract},
      {"6 desk-scale generation", [&] { return desk_scale(scratch.path()); }},
      {"7 goldens and invariant suites", goldens_and_invariants},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
