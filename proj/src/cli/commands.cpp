#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "synthpass/cli.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/core/text_util.hpp"
#include "synthpass/mrz.hpp"
#include "synthpass/pad_metrics.hpp"
#include "synthpass/pattern_tools.hpp"
#include "synthpass/protocols.hpp"
#include "synthpass/subject_gen.hpp"
#include "synthpass/template_model.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace synthpass::cli {

namespace {

bool make_dir(const fs::path& dir, std::ostream& err, const char* cmd) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) err << cmd << ": cannot create " << dir.string() << ": " << ec.message() << '\n';
  return !ec;
}

json criterion_json(const Criterion& c) { return {{"value", c.value}, {"pass", c.pass}}; }

// Images are grouped by the file stem up to its last '_' ("s03_2.png" belongs to "s03").
std::string subject_of(const fs::path& p) {
  const std::string stem = p.stem().string();
  const auto cut = stem.rfind('_');
  return cut == std::string::npos ? stem : stem.substr(0, cut);
}

}  // namespace

int cmd_filter(const FilterOptions& o, std::ostream& out, std::ostream& err) {
  if (o.k < 1) {
    err << "filter: k must be >= 1\n";
    return kUsage;
  }
  if (const auto bad = o.thresholds.check(); !bad.empty()) {
    err << "filter: " << bad << '\n';
    return kUsage;
  }
  if (!fs::is_directory(o.faces)) {
    err << "filter: " << o.faces.string() << " is not a directory\n";
    return kFailure;
  }
  std::map<std::string, std::vector<fs::path>> groups;
  for (const auto& e : fs::directory_iterator(o.faces)) {
    if (e.is_regular_file() && e.path().extension() == ".png") groups[subject_of(e.path())].push_back(e.path());
  }
  if (!make_dir(o.out, err, "filter")) return kFailure;

  const SidecarLandmarkProvider provider;
  std::string audit;
  std::size_t kept = 0;
  try {
    for (auto& [subject, paths] : groups) {
      std::sort(paths.begin(), paths.end());
      std::vector<Candidate> candidates;
      json skipped = json::array();
      for (const auto& p : paths) {
        Raster img = read_png(p);
        auto lm = provider.detect(p, img);
        if (!lm) {
          skipped.push_back({{"image", p.filename().string()}, {"reason", "no landmarks"}});
          continue;
        }
        candidates.push_back({std::move(img), *lm, p.filename().string()});
      }
      const Selection sel = rank_and_select(candidates, o.thresholds, o.k);
      json rec;
      rec["subject"] = subject;
      auto& cands = rec["candidates"] = json::array();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const QualityReport& r = sel.reports[i];
        cands.push_back({{"image", candidates[i].id},
                         {"bbox_pixels", criterion_json(r.bbox_pixels)},
                         {"eye_distance_ratio", criterion_json(r.eye_distance_ratio)},
                         {"eye_margin_ratio", criterion_json(r.eye_margin_ratio)},
                         {"sharpness", criterion_json(r.sharpness)},
                         {"rank_score", std::isfinite(r.rank_score) ? json(r.rank_score) : json(nullptr)},
                         {"overall_pass", r.overall_pass}});
      }
      rec["skipped"] = std::move(skipped);
      auto& chosen = rec["selected"] = json::array();
      for (std::size_t idx : sel.chosen) {
        const Candidate& c = candidates[idx];
        chosen.push_back(c.id);
        const fs::path dst = o.out / c.id;
        if (o.crop) {
          write_png(dst, crop_icao(c.image, c.landmarks, o.crop->first, o.crop->second));
        } else {
          fs::copy_file(o.faces / c.id, dst, fs::copy_options::overwrite_existing);
          fs::copy_file(SidecarLandmarkProvider::sidecar_path(o.faces / c.id),
                        SidecarLandmarkProvider::sidecar_path(dst), fs::copy_options::overwrite_existing);
        }
      }
      rec["short_of_k"] = sel.short_of_k;
      rec["no_passing_candidates"] = sel.no_passing_candidates;
      if (sel.short_of_k) {
        err << "filter: warning: subject " << subject << " has " << sel.chosen.size() << " passing images (wanted "
            << o.k << ")\n";
      }
      kept += sel.chosen.size();
      audit += rec.dump() + '\n';
    }
  } catch (const std::exception& e) {
    err << "filter: " << e.what() << '\n';
    return kFailure;
  }
  std::ofstream(o.out / "quality.jsonl", std::ios::binary) << audit;
  out << "filter: kept " << kept << " images for " << groups.size() << " subjects\n";
  return kOk;
}

int cmd_split(const SplitOptions& o, std::ostream& out, std::ostream& err) {
  if (o.mode != "intra" && o.mode != "loo") {
    err << "split: unknown mode '" << o.mode << "' (expected intra or loo)\n";
    return kUsage;
  }
  std::optional<Pai> pai;
  if (o.mode == "loo") {
    pai = parse_pai(o.test_pai);
    if (o.test_country.empty() || !pai || *pai == Pai::None) {
      err << "split: loo needs --test-country and --test-pai print|screen\n";
      return kUsage;
    }
  } else if (o.ratios.size() != 3) {
    err << "split: --ratios takes three values\n";
    return kUsage;
  }
  try {
    const Manifest m = read_manifest(o.manifest);
    if (!make_dir(o.out, err, "split")) return kFailure;
    SplitResult r;
    if (o.mode == "intra") {
      r = split_intra(m, {o.ratios[0], o.ratios[1], o.ratios[2]}, o.seed);
    } else {
      LooSplit loo = split_loo(m, o.test_country, *pai, o.val_fraction, o.seed);
      write_manifest(o.out / "excluded.csv", loo.excluded);
      r = std::move(loo.split);
      out << "excluded: " << loo.excluded.size() << '\n';
    }
    write_manifest(o.out / "train.csv", r.train);
    write_manifest(o.out / "val.csv", r.validation);
    write_manifest(o.out / "test.csv", r.test);
    out << "train: " << r.train.size() << "\nval: " << r.validation.size() << "\ntest: " << r.test.size() << '\n';
  } catch (const std::exception& e) {
    err << "split: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

namespace {

std::optional<PaiSelector> parse_selector(const std::string& s) {
  if (s == "worst" || s == "worst-case") return PaiSelector{WorstCase{}};
  if (s == "print") return PaiSelector{Pai::Print};
  if (s == "screen") return PaiSelector{Pai::Screen};
  return std::nullopt;
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const auto sel = parse_selector(o.pai);
  if (!sel) {
    err << "evaluate: --pai must be worst, print or screen\n";
    return kUsage;
  }
  try {
    const ScoreSet s = read_scores(o.scores);
    const PadMetrics m = evaluate(s, *sel);
    write_report(out, s, m);
    if (!o.out.empty()) {
      if (!make_dir(o.out, err, "evaluate")) return kFailure;
      std::ofstream txt(o.out / "report.txt", std::ios::binary);
      write_report(txt, s, m);
      std::ofstream(o.out / "report.json", std::ios::binary) << report_json(s, m) << '\n';
      std::ofstream det(o.out / "det.csv", std::ios::binary);
      write_det(det, s, m.det_points);
    }
  } catch (const std::exception& e) {
    err << "evaluate: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

int cmd_det(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const auto sel = parse_selector(o.pai);
  if (!sel) {
    err << "det: --pai must be worst, print or screen\n";
    return kUsage;
  }
  try {
    const ScoreSet s = read_scores(o.scores);
    write_det(out, s, det_curve(s, *sel));
  } catch (const std::exception& e) {
    err << "det: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

int cmd_inspect(const InspectOptions& o, std::ostream& out, std::ostream& err) {
  if (!o.config && !o.subjects && o.mrz_lines.empty()) {
    err << "inspect: give --config, --subjects or --mrz\n";
    return kUsage;
  }
  if (!o.mrz_lines.empty() && o.mrz_lines.size() != 2) {
    err << "inspect: --mrz takes exactly two lines\n";
    return kUsage;
  }
  std::size_t problems = 0;
  try {
    std::optional<CountryConfig> cfg;
    if (o.config) {
      const fs::path path = resolve_config(*o.config);
      cfg = load_config(path);
      std::map<LayerClass, int> by_class;
      for (const auto& l : cfg->layers) ++by_class[l.layer_class];
      out << path.string() << ": " << cfg->country_code << ", " << cfg->canvas.width << "x" << cfg->canvas.height
          << " px @ " << cfg->canvas.dpi << " dpi, " << cfg->layers.size() << " layers\n";
      for (const auto& [cls, n] : by_class) out << "  " << to_string(cls) << ": " << n << '\n';
      for (const auto& l : cfg->layers) {
        out << "  z=" << l.z_order << " " << l.id << " [" << to_string(l.layer_class) << "] " << l.bounds.x << ","
            << l.bounds.y << " " << l.bounds.w << "x" << l.bounds.h << " opacity " << l.opacity << '\n';
      }
      const Template tpl = derive_empty_template(std::make_shared<const CountryConfig>(*cfg));
      for (const auto& v : validate_template(tpl)) {
        err << v << '\n';
        ++problems;
      }
      if (o.empty_template_png) write_png(*o.empty_template_png, tpl.empty);
    }
    if (o.subjects) {
      if (!cfg) {
        err << "inspect: --subjects needs --config\n";
        return kUsage;
      }
      std::ifstream in(*o.subjects, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + o.subjects->string());
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++n;
        const SubjectRecord r = subject_from_json(line);
        for (const auto& v : validate_subject(r, *cfg)) {
          err << v << '\n';
          ++problems;
        }
        const auto j = nlohmann::json::parse(line);
        if (j.contains("mrz_line1") && j.contains("mrz_line2")) {
          for (auto v : validate_td3(j["mrz_line1"].get<std::string>(), j["mrz_line2"].get<std::string>())) {
            v.subject = "subject " + std::to_string(r.subject_id) + " mrz " + v.subject;
            err << v << '\n';
            ++problems;
          }
        }
      }
      out << o.subjects->string() << ": " << n << " subjects checked\n";
    }
    if (!o.mrz_lines.empty()) {
      for (const auto& v : validate_td3(o.mrz_lines[0], o.mrz_lines[1])) {
        err << "mrz " << v << '\n';
        ++problems;
      }
      out << "mrz: " << (problems ? "invalid" : "valid") << '\n';
    }
  } catch (const std::exception& e) {
    err << "inspect: " << e.what() << '\n';
    return kFailure;
  }
  return problems ? kFailure : kOk;
}

int cmd_pattern(const PatternOptions& o, std::ostream& out, std::ostream& err) {
  const std::string hex = o.color.size() == 7 && o.color[0] == '#' ? o.color.substr(1) : std::string();
  if (hex.size() != 6 || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    err << "pattern: --color must be #rrggbb\n";
    return kUsage;
  }
  if (o.tolerance < 0 || o.k < 1) {
    err << "pattern: tolerance must be >= 0 and k >= 1\n";
    return kUsage;
  }
  const auto channel = [&](int i) { return static_cast<std::uint8_t>(std::stoi(hex.substr(2 * i, 2), nullptr, 16)); };
  try {
    const Raster img = read_png(o.image);
    const BinaryMask mask = threshold_extract(img, {channel(0), channel(1), channel(2), 255}, o.tolerance);
    auto comps = contour_components(mask, o.min_area);
    if (o.components > 0 && comps.size() > o.components) comps.resize(o.components);
    if (comps.empty()) {
      err << "pattern: no component of at least " << o.min_area << " px matches " << o.color << '\n';
      return kFailure;
    }
    BinaryMask keep(mask.width(), mask.height());
    for (const auto& c : comps) paint_component(keep, c);
    const PatternAsset asset = extract_pattern(img, keep, o.k, o.snap);
    if (o.out.has_parent_path() && !make_dir(o.out.parent_path(), err, "pattern")) return kFailure;
    save_pattern_asset(o.out, asset);
    out << "pattern: " << comps.size() << " components, bounds " << asset.source_bounds.x << ","
        << asset.source_bounds.y << " " << asset.source_bounds.w << "x" << asset.source_bounds.h << ", "
        << asset.palette.entries.size() << " palette colours" << (asset.palette.fewer_colors_than_k ? " (fewer than k)" : "")
        << '\n';
  } catch (const std::exception& e) {
    err << "pattern: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace synthpass::cli
