#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "synthpass/cli.hpp"
#include "synthpass/compositor.hpp"
#include "synthpass/core/hash.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/mrz.hpp"
#include "synthpass/protocols.hpp"
#include "synthpass/subject_gen.hpp"
#include "synthpass/template_model.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace synthpass::cli {

fs::path resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  if (const char* dir = std::getenv(kConfigDirEnv)) {
    const fs::path base(dir);
    for (const fs::path& candidate : {base / arg, base / (arg + ".json"), base / arg / "config.json"}) {
      if (fs::is_regular_file(candidate)) return candidate;
    }
  }
  throw std::runtime_error("config '" + arg + "' not found" +
                           (std::getenv(kConfigDirEnv) ? std::string(" (also searched $") + kConfigDirEnv + ")"
                                                       : std::string()));
}

namespace {

std::vector<std::string> list_pngs(const std::optional<fs::path>& dir) {
  std::vector<std::string> out;
  if (!dir) return out;
  if (!fs::is_directory(*dir)) throw std::runtime_error("asset pool " + dir->string() + " is not a directory");
  for (const auto& e : fs::directory_iterator(*dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string image_name(const std::string& country, int subject_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05d.png", country.c_str(), subject_id);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct CountryRun {
  std::string config_arg;
  fs::path config_path;
  std::shared_ptr<const CountryConfig> config;
  std::shared_ptr<const Template> tpl;
  AssetLists assets;
  std::vector<SubjectRecord> subjects;
};

struct DocumentOutput {
  std::string image_path;
  std::string image_sha256;
  std::string subject_line;
  std::string error;
};

json hashes_of(const std::map<std::string, fs::path>& files) {
  json j = json::object();
  for (const auto& [k, p] : files) j[k] = sha256_file(p);
  return j;
}

}  // namespace

GenerateOptions options_from_receipt(const fs::path& receipt) {
  std::ifstream in(receipt, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open receipt " + receipt.string());
  const auto j = nlohmann::json::parse(in);
  GenerateOptions o;
  o.n = j.at("n").get<std::size_t>();
  o.seed = j.at("seed").get<std::uint64_t>();
  o.scale = j.at("scale").get<double>();
  o.shared_subjects = j.at("shared_subjects").get<bool>();
  o.first_subject_id = j.at("first_subject_id").get<int>();
  o.edge_blur_sigma = j.at("edge_blur_sigma").get<double>();
  o.sensor_noise = j.at("sensor_noise").get<double>();
  for (const auto& c : j.at("configs")) {
    const std::string path = c.at("path").get<std::string>();
    const std::string recorded = c.at("sha256").get<std::string>();
    const std::string now = sha256_file(resolve_config(path));
    if (now != recorded) {
      throw std::runtime_error("config " + path + " changed since the receipt was written (sha256 " + now +
                               ", receipt " + recorded + ")");
    }
    o.configs.push_back(path);
  }
  return o;
}

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.configs.empty()) {
    err << "generate: at least one --config is required\n";
    return kUsage;
  }
  if (o.n == 0 || !(o.scale > 0.0)) {
    err << "generate: n must be >= 1 and scale > 0\n";
    return kUsage;
  }

  std::vector<CountryRun> runs;
  try {
    for (const auto& arg : o.configs) {
      CountryRun r;
      r.config_arg = arg;
      r.config_path = resolve_config(arg);
      CountryConfig cfg = load_config(r.config_path);
      const Dictionaries dicts = load_dictionaries(cfg);
      r.assets.faces = list_pngs(cfg.assets.faces);
      r.assets.signatures = list_pngs(cfg.assets.signatures);
      r.assets.fingerprints = list_pngs(cfg.assets.fingerprints);
      GenerationOptions gen;
      gen.first_subject_id = o.first_subject_id;
      gen.shared_across_countries = o.shared_subjects;
      r.subjects = generate_subjects(o.n, o.seed, cfg, dicts, r.assets, gen);
      if (o.scale != 1.0) cfg = scale_config(cfg, o.scale);
      r.config = std::make_shared<const CountryConfig>(std::move(cfg));
      r.tpl = std::make_shared<const Template>(derive_empty_template(r.config, o.edge_blur_sigma));
      const ValidationReport problems = validate_template(*r.tpl);
      if (!problems.empty()) {
        for (const auto& v : problems) err << r.config_path.string() << ": " << v << '\n';
        return kFailure;
      }
      for (const auto& c : runs) {
        if (c.config->country_code == r.config->country_code) {
          err << "generate: country " << r.config->country_code << " given twice\n";
          return kUsage;
        }
      }
      runs.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    err << "generate: " << e.what() << '\n';
    return kFailure;
  }

  std::error_code ec;
  fs::create_directories(o.out / "images", ec);
  fs::create_directories(o.out / "subjects", ec);
  fs::create_directories(o.out / "logs", ec);
  if (ec) {
    err << "generate: cannot create " << o.out.string() << ": " << ec.message() << '\n';
    return kFailure;
  }

  Manifest manifest;
  json image_hashes = json::object();
  for (const auto& run : runs) {
    const CountryConfig& cfg = *run.config;
    std::vector<DocumentOutput> docs(run.subjects.size());
    const auto count = static_cast<std::ptrdiff_t>(run.subjects.size());
    const int workers = o.workers > 0 ? o.workers : omp_get_max_threads();
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const SubjectRecord& s = run.subjects[static_cast<std::size_t>(i)];
      DocumentOutput& d = docs[static_cast<std::size_t>(i)];
      try {
        RenderJob job;
        job.tpl = run.tpl;
        job.subject = s;
        job.mrz = build_td3(s, cfg.country_code);
        job.seed = derive_seed(o.seed, static_cast<std::uint64_t>(s.subject_id), 0x72656e646572ULL);
        job.post_ops.edge_blur_sigma = o.edge_blur_sigma;
        job.post_ops.sensor_noise = o.sensor_noise;
        if (!s.face_asset.empty()) {
          const fs::path face = *cfg.assets.faces / s.face_asset;
          job.assets.face = read_png(face);
          SidecarLandmarkProvider provider;
          job.assets.face_landmarks = provider.detect(face, *job.assets.face);
        }
        if (!s.signature_asset.empty()) job.assets.signature = read_png(*cfg.assets.signatures / s.signature_asset);
        if (s.fingerprint_asset) job.assets.fingerprint = read_png(*cfg.assets.fingerprints / *s.fingerprint_asset);
        const RenderResult result = render_document(job);
        const std::string name = image_name(cfg.country_code, s.subject_id);
        const auto bytes = encode_png(result.image);
        std::ofstream png(o.out / "images" / name, std::ios::binary);
        png.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!png) throw std::runtime_error("cannot write image " + name);
        d.image_path = "images/" + name;
        d.image_sha256 = sha256_hex(bytes);
        d.subject_line = to_json_line(s, {{"image", d.image_path}, {"mrz_line1", job.mrz.line1},
                                          {"mrz_line2", job.mrz.line2}});
        write_text(o.out / "logs" / (name.substr(0, name.size() - 4) + ".render.jsonl"),
                   render_log_jsonl(result, d.image_path));
      } catch (const std::exception& e) {
        d.error = e.what();
      }
    }

    std::string subjects_text;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!docs[i].error.empty()) {
        err << "generate: " << cfg.country_code << " subject " << run.subjects[i].subject_id << ": " << docs[i].error
            << '\n';
        return kFailure;
      }
      subjects_text += docs[i].subject_line + '\n';
      manifest.push_back({docs[i].image_path, cfg.country_code, run.subjects[i].subject_id, Label::BonaFide,
                          Pai::None, ""});
      image_hashes[docs[i].image_path] = docs[i].image_sha256;
    }
    write_text(o.out / "subjects" / (cfg.country_code + ".jsonl"), subjects_text);
    out << cfg.country_code << ": rendered " << docs.size() << " documents\n";
  }

  std::ostringstream manifest_text;
  write_manifest(manifest_text, manifest);
  write_text(o.out / "manifest.csv", manifest_text.str());

  json receipt;
  receipt["tool"] = "synthpass";
  receipt["version"] = kVersion;
  receipt["seed"] = o.seed;
  receipt["n"] = o.n;
  receipt["scale"] = o.scale;
  receipt["shared_subjects"] = o.shared_subjects;
  receipt["first_subject_id"] = o.first_subject_id;
  receipt["edge_blur_sigma"] = o.edge_blur_sigma;
  receipt["sensor_noise"] = o.sensor_noise;
  auto& configs = receipt["configs"] = json::array();
  for (const auto& run : runs) {
    const CountryConfig& c = *run.config;
    json entry;
    entry["path"] = run.config_arg;
    entry["country"] = c.country_code;
    entry["sha256"] = sha256_file(run.config_path);
    entry["dictionaries"] = hashes_of({{"given_male", c.dictionaries.given_male},
                                       {"given_female", c.dictionaries.given_female},
                                       {"surname", c.dictionaries.surname},
                                       {"city", c.dictionaries.city},
                                       {"authority", c.dictionaries.authority}});
    entry["fonts"] = hashes_of(c.font_paths);
    std::map<std::string, fs::path> layer_files;
    for (const auto& l : c.layers) {
      if (l.mask_ref) layer_files[l.id + ".mask"] = *l.mask_ref;
      if (!l.is_text() && !l.image().asset.empty()) layer_files[l.id] = l.image().asset;
    }
    entry["layer_assets"] = hashes_of(layer_files);
    const std::pair<const char*, const std::optional<fs::path>*> pools[] = {
        {"faces", &c.assets.faces}, {"signatures", &c.assets.signatures}, {"fingerprints", &c.assets.fingerprints}};
    for (const auto& [name, dir] : pools) {
      std::map<std::string, fs::path> files;
      for (const auto& f : list_pngs(*dir)) files[f] = **dir / f;
      if (*dir) entry["asset_pools"][name] = hashes_of(files);
    }
    configs.push_back(std::move(entry));
  }
  receipt["outputs"]["manifest"] = sha256_hex(manifest_text.str());
  receipt["outputs"]["images"] = std::move(image_hashes);
  write_text(o.out / "receipt.json", receipt.dump(2) + '\n');
  out << "manifest: " << (o.out / "manifest.csv").string() << " (" << manifest.size() << " entries)\n";
  return kOk;
}

}  // namespace synthpass::cli
