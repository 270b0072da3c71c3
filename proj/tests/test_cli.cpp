#include <cstdlib>
#include <set>
#include <sstream>

#include "doctest.h"
#include "metrics_support.hpp"
#include "synthpass/cli.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/pattern_tools.hpp"
#include "synthpass/protocols.hpp"

using namespace synthpass;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

template <typename Options, typename Fn>
Run run(Fn fn, const Options& o) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = fn(o, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string pol_config() { return (testsupport::fixtures() / "countries/POL/config.json").string(); }

json read_json(const fs::path& p) { return json::parse(testsupport::slurp(p)); }

}  // namespace

TEST_CASE("generate with one subject writes one image and a one-row manifest") {
  testsupport::ScratchDir dir("gen1");
  cli::GenerateOptions o;
  o.configs = {pol_config()};
  o.n = 1;
  o.seed = 11;
  o.scale = 0.5;
  o.out = dir.path();
  const Run r = run(cli::cmd_generate, o);
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  CHECK(r.err.empty());
  const Manifest m = read_manifest(dir / "manifest.csv");
  REQUIRE(m.size() == 1);
  CHECK(m[0].path == "images/POL_00001.png");
  CHECK(m[0].label == Label::BonaFide);
  const Raster img = read_png(dir.path() / m[0].path);
  CHECK(img.width() == 738);
  CHECK(fs::exists(dir / "subjects/POL.jsonl"));
  CHECK(fs::exists(dir / "logs/POL_00001.render.jsonl"));

  const json receipt = read_json(dir / "receipt.json");
  CHECK(receipt["seed"] == 11);
  CHECK(receipt["configs"].size() == 1);
  CHECK(receipt["configs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK(receipt["outputs"]["images"].contains("images/POL_00001.png"));
}

TEST_CASE("rerunning from a receipt reproduces every output hash") {
  testsupport::ScratchDir a("receipt_a");
  testsupport::ScratchDir b("receipt_b");
  cli::GenerateOptions o;
  o.configs = {pol_config(), (testsupport::fixtures() / "countries/ESP/config.json").string()};
  o.n = 2;
  o.seed = 99;
  o.scale = 0.5;
  o.out = a.path();
  REQUIRE(run(cli::cmd_generate, o).code == cli::kOk);

  cli::GenerateOptions again = cli::options_from_receipt(a / "receipt.json");
  CHECK(again.seed == 99);
  CHECK(again.n == 2);
  CHECK(again.scale == 0.5);
  CHECK(again.configs == o.configs);
  again.out = b.path();
  again.workers = 1;
  REQUIRE(run(cli::cmd_generate, again).code == cli::kOk);
  const json ra = read_json(a / "receipt.json");
  const json rb = read_json(b / "receipt.json");
  CHECK(ra["outputs"] == rb["outputs"]);
  CHECK(ra["outputs"]["images"].size() == 4);
  CHECK(testsupport::slurp(a / "manifest.csv") == testsupport::slurp(b / "manifest.csv"));
  CHECK(testsupport::slurp(a / "subjects/ESP.jsonl") == testsupport::slurp(b / "subjects/ESP.jsonl"));
}

TEST_CASE("config names resolve under the config directory variable") {
  ::setenv(cli::kConfigDirEnv, (testsupport::fixtures() / "countries").c_str(), 1);
  CHECK(cli::resolve_config("POL") == testsupport::fixtures() / "countries/POL/config.json");
  CHECK(cli::resolve_config(pol_config()) == fs::path(pol_config()));
  ::unsetenv(cli::kConfigDirEnv);

  testsupport::ScratchDir dir("genbad");
  cli::GenerateOptions o;
  o.configs = {"NOPE"};
  o.out = dir.path();
  const Run r = run(cli::cmd_generate, o);
  CHECK(r.code != cli::kOk);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());

  o.configs = {pol_config(), pol_config()};
  CHECK(run(cli::cmd_generate, o).code == cli::kUsage);
}

TEST_CASE("split writes partitions and rejects unknown modes") {
  testsupport::ScratchDir dir("split");
  Manifest m;
  for (const char* c : {"ESP", "POL", "PRT"}) {
    for (int id = 1; id <= 20; ++id) {
      const std::string s = std::string(c) + std::to_string(id);
      m.push_back({"bf/" + s, c, id, Label::BonaFide, Pai::None, ""});
      m.push_back({"pr/" + s, c, id, Label::Attack, Pai::Print, ""});
      m.push_back({"sc/" + s, c, id, Label::Attack, Pai::Screen, ""});
    }
  }
  write_manifest(dir / "m.csv", m);

  cli::SplitOptions o;
  o.manifest = dir / "m.csv";
  o.mode = "intra";
  o.out = dir / "intra";
  REQUIRE(run(cli::cmd_split, o).code == cli::kOk);
  CHECK(read_manifest(dir / "intra/train.csv").size() == 108);
  CHECK(read_manifest(dir / "intra/val.csv").size() == 36);
  CHECK(read_manifest(dir / "intra/test.csv").size() == 36);

  o.mode = "loo";
  o.out = dir / "loo";
  o.test_country = "POL";
  o.test_pai = "print";
  REQUIRE(run(cli::cmd_split, o).code == cli::kOk);
  const Manifest test = read_manifest(dir / "loo/test.csv");
  CHECK(test.size() == 40);
  for (const auto& e : test) CHECK((e.country == "POL" && e.pai != Pai::Screen));
  CHECK(read_manifest(dir / "loo/excluded.csv").size() == 20);

  o.mode = "kfold";
  const Run bad = run(cli::cmd_split, o);
  CHECK(bad.code == cli::kUsage);
  CHECK(bad.err.find("kfold") != std::string::npos);

  // Protocol errors reach the user verbatim.
  o.mode = "loo";
  o.test_country = "DEU";
  const Run missing = run(cli::cmd_split, o);
  CHECK(missing.code == cli::kFailure);
  CHECK(missing.err.find("test country 'DEU' does not occur") != std::string::npos);
}

TEST_CASE("evaluate reproduces the golden reports") {
  testsupport::ScratchDir dir("eval");
  for (const auto& name : testsupport::golden_score_files()) {
    for (const std::string mode : {"worst", "print", "screen"}) {
      cli::EvaluateOptions o;
      o.scores = testsupport::fixtures() / "scores" / (name + ".csv");
      o.pai = mode;
      o.out = dir / (name + "_" + mode);
      const Run r = run(cli::cmd_evaluate, o);
      REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
      CHECK(r.out.find("BPCER100") != std::string::npos);
      const json got = read_json(o.out / "report.json");
      const json want = read_json(testsupport::fixtures() / "golden" / (name + "." + mode + ".json"));
      const auto bad = testsupport::compare_report(got, want, 1e-9);
      CHECK_MESSAGE(bad.empty(), name << "." << mode << ": " << (bad.empty() ? "" : bad.front()));
      CHECK(fs::exists(o.out / "det.csv"));
      CHECK(fs::exists(o.out / "report.txt"));
    }
  }
}

TEST_CASE("evaluate reports malformed rows by line and rejects single-class files") {
  testsupport::ScratchDir dir("evalbad");
  auto eval = [&](const std::string& text) {
    std::ofstream(dir / "s.csv") << text;
    cli::EvaluateOptions o;
    o.scores = dir / "s.csv";
    return run(cli::cmd_evaluate, o);
  };
  const Run empty = eval("");
  CHECK(empty.code == cli::kFailure);
  CHECK(empty.err.find("line 1") != std::string::npos);
  const Run bad_row = eval("path,label,pai,score\na,bonafide,none,0.1\nb,attack,print,x\n");
  CHECK(bad_row.code == cli::kFailure);
  CHECK(bad_row.err.find("line 3") != std::string::npos);
  const Run no_bf = eval("path,label,pai,score\na,attack,print,0.1\nb,attack,screen,0.3\n");
  CHECK(no_bf.code == cli::kFailure);
  CHECK(no_bf.err.find("bona fide") != std::string::npos);

  cli::EvaluateOptions o;
  o.scores = testsupport::fixtures() / "scores/small.csv";
  o.pai = "video";
  CHECK(run(cli::cmd_evaluate, o).code == cli::kUsage);

  o.pai = "print";
  const Run det = run(cli::cmd_det, o);
  CHECK(det.code == cli::kOk);
  CHECK(det.out.rfind("apcer,bpcer,threshold,apcer_probit,bpcer_probit\n", 0) == 0);
}

TEST_CASE("filter keeps the three sharpest faces per subject") {
  testsupport::ScratchDir dir("filter");
  cli::FilterOptions o;
  o.faces = testsupport::fixtures() / "faces";
  o.out = dir.path();
  const Run r = run(cli::cmd_filter, o);
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  std::set<std::string> got;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    if (e.path().extension() == ".png") got.insert(e.path().filename().string());
  }
  std::set<std::string> want;
  for (const auto& e : fs::directory_iterator(testsupport::fixtures() / "portraits")) {
    if (e.path().extension() == ".png") want.insert(e.path().filename().string());
  }
  CHECK(got == want);
  CHECK(got.size() == 15);
  CHECK(testsupport::slurp(dir / "quality.jsonl") == testsupport::slurp(testsupport::fixtures() / "portraits/quality.jsonl"));

  o.k = 0;
  CHECK(run(cli::cmd_filter, o).code == cli::kUsage);
  o.k = 3;
  o.thresholds.min_sharpness = 0.0;
  CHECK(run(cli::cmd_filter, o).code == cli::kUsage);
}

TEST_CASE("inspect validates configs and machine-readable lines") {
  testsupport::ScratchDir dir("inspect");
  cli::InspectOptions o;
  o.config = pol_config();
  o.empty_template_png = dir / "empty.png";
  const Run r = run(cli::cmd_inspect, o);
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("POL, 1476x1039") != std::string::npos);
  CHECK(read_png(dir / "empty.png").width() == 1476);

  cli::InspectOptions m;
  m.mrz_lines = {"P<UTOERIKSSON<<ANNA<MARIA<<<<<<<<<<<<<<<<<<<", "L898902C36UTO7408122F1204159ZE184226B<<<<<10"};
  const Run ok = run(cli::cmd_inspect, m);
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out == "mrz: valid\n");
  m.mrz_lines[1][9] = '7';
  const Run bad = run(cli::cmd_inspect, m);
  CHECK(bad.code == cli::kFailure);
  CHECK(bad.err.find("check") != std::string::npos);

  CHECK(run(cli::cmd_inspect, cli::InspectOptions{}).code == cli::kUsage);
}

TEST_CASE("pattern extracts a coloured logo into an asset with a palette") {
  testsupport::ScratchDir dir("pattern");
  Raster img(60, 40, {240, 240, 240, 255});
  for (int y = 10; y < 30; ++y) {
    for (int x = 15; x < 45; ++x) img.at(x, y) = {200, 30, 40, 255};
  }
  img.at(2, 2) = {200, 30, 40, 255};
  write_png(dir / "ref.png", img);
  cli::PatternOptions o;
  o.image = dir / "ref.png";
  o.color = "#c81e28";
  o.min_area = 10;
  o.k = 1;
  o.out = dir / "logo.png";
  const Run r = run(cli::cmd_pattern, o);
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  CHECK(r.out.find("1 components, bounds 15,10 30x20") != std::string::npos);
  const PatternAsset a = load_pattern_asset(dir / "logo.png");
  CHECK(a.image.width() == 30);
  REQUIRE(a.palette.entries.size() == 1);
  CHECK(a.palette.entries[0].color == Rgb{200, 30, 40});

  o.color = "red";
  CHECK(run(cli::cmd_pattern, o).code == cli::kUsage);
  o.color = "#00ff00";
  CHECK(run(cli::cmd_pattern, o).code == cli::kFailure);
}
