#include <CLI11.hpp>
#include <iostream>

#include "synthpass/cli.hpp"

namespace cli = synthpass::cli;

int main(int argc, char** argv) {
  CLI::App app{"synthpass: synthetic passport generation and PAD evaluation"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  cli::GenerateOptions gen;
  std::string receipt;
  auto* g = app.add_subcommand("generate", "Generate subjects and render passport images");
  g->add_option("-c,--config", gen.configs,
                "Country config file, or a name looked up under $SYNTHPASS_CONFIG_DIR (repeatable)");
  g->add_option("-n,--count", gen.n, "Documents per country")->check(CLI::PositiveNumber);
  g->add_option("-s,--seed", gen.seed, "Master seed");
  g->add_option("-o,--out", gen.out, "Output directory")->required();
  g->add_option("-j,--workers", gen.workers, "Render workers (0 = all cores)")->check(CLI::NonNegativeNumber);
  g->add_option("--scale", gen.scale, "Canvas scale factor, e.g. 0.5 for half resolution")->check(CLI::PositiveNumber);
  g->add_flag("--shared-subjects", gen.shared_subjects,
              "Draw the same subject streams in every country instead of per-country streams");
  g->add_option("--first-id", gen.first_subject_id, "First subject id");
  g->add_option("--edge-blur", gen.edge_blur_sigma, "Default edge blur sigma in pixels")->check(CLI::NonNegativeNumber);
  g->add_option("--sensor-noise", gen.sensor_noise, "Seeded luma noise std-dev")->check(CLI::NonNegativeNumber);
  g->add_option("--from-receipt", receipt, "Rerun with the parameters recorded in a receipt.json")
      ->excludes("--config");

  cli::FilterOptions fil;
  std::vector<int> crop;
  auto* f = app.add_subcommand("filter", "Rank candidate face images and keep the top k per subject");
  f->add_option("--faces", fil.faces, "Directory of <subject>_<n>.png images with .landmarks.json sidecars")
      ->required();
  f->add_option("-o,--out", fil.out, "Output directory")->required();
  f->add_option("-k", fil.k, "Images kept per subject")->check(CLI::PositiveNumber);
  f->add_option("--min-bbox", fil.thresholds.min_bbox_pixels, "Minimum face box side in pixels");
  f->add_option("--min-eye-distance", fil.thresholds.min_eye_distance_ratio, "Minimum eye distance / image width");
  f->add_option("--min-eye-margin", fil.thresholds.min_eye_margin_ratio, "Minimum eye-to-edge margin ratio");
  f->add_option("--min-sharpness", fil.thresholds.min_sharpness, "Minimum Laplacian variance");
  f->add_option("--crop", crop, "Write ICAO crops of W H pixels instead of the originals")->expected(2);

  cli::SplitOptions spl;
  auto* s = app.add_subcommand("split", "Split a manifest into train/val/test by subject");
  s->add_option("-m,--manifest", spl.manifest, "Manifest CSV")->required();
  s->add_option("--mode", spl.mode, "intra or loo")->required();
  s->add_option("-s,--seed", spl.seed, "Shuffle seed");
  s->add_option("-o,--out", spl.out, "Output directory")->required();
  s->add_option("--ratios", spl.ratios, "Train, validation and test fractions (intra)")->expected(3);
  s->add_option("--test-country", spl.test_country, "Held-out country (loo)");
  s->add_option("--test-pai", spl.test_pai, "Attack instrument evaluated on the held-out country: print or screen");
  s->add_option("--val-fraction", spl.val_fraction, "Fraction of training-country subjects used for validation");

  cli::EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "Compute EER, BPCER10/20/100 and DET data from a score file");
  e->add_option("scores", ev.scores, "Score CSV (path,label,pai,score)")->required();
  e->add_option("--pai", ev.pai, "worst, print or screen");
  e->add_option("-o,--out", ev.out, "Directory for report.txt, report.json and det.csv");

  cli::EvaluateOptions dt;
  auto* d = app.add_subcommand("det", "Print plot-ready DET columns with normal-deviate axes");
  d->add_option("scores", dt.scores, "Score CSV")->required();
  d->add_option("--pai", dt.pai, "worst, print or screen");

  cli::InspectOptions ins;
  std::string config, empty_png, subjects;
  auto* i = app.add_subcommand("inspect", "Validate configs, subject files or MRZ lines");
  i->add_option("-c,--config", config, "Country config to load and validate");
  i->add_option("--empty-template", empty_png, "Write the derived empty template PNG here");
  i->add_option("--subjects", subjects, "Subject JSONL to validate against --config");
  i->add_option("--mrz", ins.mrz_lines, "Two MRZ lines to validate")->expected(2);

  cli::PatternOptions pat;
  auto* p = app.add_subcommand("pattern", "Extract a logo or pattern by colour thresholding");
  p->add_option("image", pat.image, "Reference image")->required();
  p->add_option("--color", pat.color, "Colour centre #rrggbb")->required();
  p->add_option("--tolerance", pat.tolerance, "Per-channel tolerance");
  p->add_option("--min-area", pat.min_area, "Drop components smaller than this many pixels");
  p->add_option("--components", pat.components, "Keep only the n largest components");
  p->add_option("-k", pat.k, "Palette size");
  p->add_flag("--snap", pat.snap, "Replace colours with their palette entries");
  p->add_option("-o,--out", pat.out, "Output PNG; the palette is written beside it")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : cli::kUsage;
  }

  if (g->parsed()) {
    if (!receipt.empty()) {
      try {
        const auto out = gen.out;
        const int workers = gen.workers;
        gen = cli::options_from_receipt(receipt);
        gen.out = out;
        gen.workers = workers;
      } catch (const std::exception& ex) {
        std::cerr << "generate: " << ex.what() << '\n';
        return cli::kFailure;
      }
    }
    return cli::cmd_generate(gen, std::cout, std::cerr);
  }
  if (f->parsed()) {
    if (!crop.empty()) fil.crop = std::pair{crop[0], crop[1]};
    return cli::cmd_filter(fil, std::cout, std::cerr);
  }
  if (s->parsed()) return cli::cmd_split(spl, std::cout, std::cerr);
  if (e->parsed()) return cli::cmd_evaluate(ev, std::cout, std::cerr);
  if (d->parsed()) return cli::cmd_det(dt, std::cout, std::cerr);
  if (i->parsed()) {
    if (!config.empty()) ins.config = config;
    if (!empty_png.empty()) ins.empty_template_png = empty_png;
    if (!subjects.empty()) ins.subjects = subjects;
    return cli::cmd_inspect(ins, std::cout, std::cerr);
  }
  if (p->parsed()) return cli::cmd_pattern(pat, std::cout, std::cerr);
  return cli::kUsage;
}
