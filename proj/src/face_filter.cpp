#include "synthpass/face_filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/kernels.hpp"

namespace synthpass {

namespace fs = std::filesystem;

std::string Landmarks::check() const {
  if (face_bbox.empty()) return "degenerate face bounding box (zero area)";
  if (!(left_eye.x < right_eye.x)) return "left eye must lie left of the right eye";
  if (!face_bbox.contains_point(left_eye.x, left_eye.y) || !face_bbox.contains_point(right_eye.x, right_eye.y)) {
    return "eye centres must lie inside the face bounding box";
  }
  return {};
}

std::string QualityThresholds::check() const {
  if (min_bbox_pixels <= 0 || !(min_eye_distance_ratio > 0) || !(min_eye_margin_ratio > 0) || !(min_sharpness > 0)) {
    return "all quality thresholds must be strictly positive";
  }
  return {};
}

fs::path SidecarLandmarkProvider::sidecar_path(const fs::path& image_path) {
  fs::path p = image_path;
  p.replace_extension(".landmarks.json");
  return p;
}

Landmarks SidecarLandmarkProvider::read(const fs::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw FaceFilterError("cannot open landmark file " + sidecar.string());
  try {
    const auto j = nlohmann::json::parse(in);
    Landmarks lm;
    lm.left_eye = {j.at("left_eye").at(0).get<double>(), j.at("left_eye").at(1).get<double>()};
    lm.right_eye = {j.at("right_eye").at(0).get<double>(), j.at("right_eye").at(1).get<double>()};
    const auto& b = j.at("face_bbox");
    lm.face_bbox = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
    lm.source = j.value("source", "sidecar");
    return lm;
  } catch (const nlohmann::json::exception& e) {
    throw FaceFilterError(sidecar.string() + ": " + e.what());
  }
}

void SidecarLandmarkProvider::write(const fs::path& sidecar, const Landmarks& lm) {
  nlohmann::ordered_json j;
  j["left_eye"] = {lm.left_eye.x, lm.left_eye.y};
  j["right_eye"] = {lm.right_eye.x, lm.right_eye.y};
  j["face_bbox"] = {lm.face_bbox.x, lm.face_bbox.y, lm.face_bbox.w, lm.face_bbox.h};
  j["source"] = lm.source.empty() ? "sidecar" : lm.source;
  std::ofstream out(sidecar);
  out << j.dump(2) << '\n';
  if (!out) throw FaceFilterError("cannot write " + sidecar.string());
}

std::optional<Landmarks> SidecarLandmarkProvider::detect(const fs::path& image_path, const Raster&) const {
  const fs::path p = sidecar_path(image_path);
  if (!fs::exists(p)) return std::nullopt;
  return read(p);
}

double sharpness(const Raster& image, const Rect& region) {
  return kernels::laplacian_moments(to_gray(image), region).variance();
}

QualityReport assess(const Raster& image, const Landmarks& lm, const QualityThresholds& t) {
  if (image.empty()) throw FaceFilterError("assess: empty image");
  if (const auto err = lm.check(); !err.empty()) throw FaceFilterError("assess: " + err);
  const double w = image.width();
  const double h = image.height();

  QualityReport r;
  r.bbox_pixels.value = std::min(lm.face_bbox.w, lm.face_bbox.h);
  r.bbox_pixels.pass = r.bbox_pixels.value >= t.min_bbox_pixels;

  r.eye_distance_ratio.value = std::hypot(lm.right_eye.x - lm.left_eye.x, lm.right_eye.y - lm.left_eye.y) / w;
  r.eye_distance_ratio.pass = r.eye_distance_ratio.value >= t.min_eye_distance_ratio;

  double margin = 1.0;
  for (const PointF& e : {lm.left_eye, lm.right_eye}) {
    margin = std::min({margin, e.x / w, (w - e.x) / w, e.y / h, (h - e.y) / h});
  }
  r.eye_margin_ratio.value = margin;
  r.eye_margin_ratio.pass = margin >= t.min_eye_margin_ratio;

  r.sharpness.value = sharpness(image, lm.face_bbox);
  r.sharpness.pass = r.sharpness.value >= t.min_sharpness;

  r.overall_pass = r.bbox_pixels.pass && r.eye_distance_ratio.pass && r.eye_margin_ratio.pass && r.sharpness.pass;
  if (r.overall_pass) r.rank_score = r.sharpness.value;
  return r;
}

Selection rank_and_select(const std::vector<Candidate>& candidates, const QualityThresholds& thresholds, std::size_t k) {
  if (k == 0) throw FaceFilterError("rank_and_select: k must be at least 1");
  Selection s;
  s.reports.resize(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  // Exceptions must not leave the parallel region; the first failing candidate is rethrown.
  std::vector<std::exception_ptr> errors(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& c = candidates[static_cast<std::size_t>(i)];
    try {
      s.reports[static_cast<std::size_t>(i)] = assess(c.image, c.landmarks, thresholds);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<std::size_t> passing;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (s.reports[i].overall_pass) passing.push_back(i);
  }
  std::stable_sort(passing.begin(), passing.end(),
                   [&](std::size_t a, std::size_t b) { return s.reports[a].rank_score > s.reports[b].rank_score; });
  if (passing.size() > k) passing.resize(k);
  s.chosen = std::move(passing);
  s.no_passing_candidates = s.chosen.empty();
  s.short_of_k = s.chosen.size() < k;
  return s;
}

PointF CropTransform::to_output(PointF p) const {
  const double dx = p.x - source_mid.x;
  const double dy = p.y - source_mid.y;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {target_mid.x + scale * (c * dx + s * dy), target_mid.y + scale * (-s * dx + c * dy)};
}

PointF CropTransform::to_source(PointF q) const {
  const double dx = (q.x - target_mid.x) / scale;
  const double dy = (q.y - target_mid.y) / scale;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {source_mid.x + c * dx - s * dy, source_mid.y + s * dx + c * dy};
}

CropTransform crop_transform(const Landmarks& lm, int out_width, int out_height, const CropGeometry& g) {
  const double ex = lm.right_eye.x - lm.left_eye.x;
  const double ey = lm.right_eye.y - lm.left_eye.y;
  const double dist = std::hypot(ex, ey);
  if (dist == 0.0) throw FaceFilterError("crop_icao: eye distance is zero");
  if (out_width <= 0 || out_height <= 0) throw FaceFilterError("crop_icao: output size must be positive");
  CropTransform t;
  const double target = g.inter_eye_width * out_width;
  t.scale = target / dist;
  t.angle = std::atan2(ey, ex);
  t.source_mid = {(lm.left_eye.x + lm.right_eye.x) / 2.0, (lm.left_eye.y + lm.right_eye.y) / 2.0};
  t.target_mid = {out_width / 2.0, out_height * (1.0 - g.eye_line_from_bottom)};
  t.target_left = {t.target_mid.x - target / 2.0, t.target_mid.y};
  t.target_right = {t.target_mid.x + target / 2.0, t.target_mid.y};
  return t;
}

Raster crop_icao(const Raster& image, const Landmarks& lm, int out_width, int out_height, const CropGeometry& g) {
  if (image.empty()) throw FaceFilterError("crop_icao: empty image");
  const CropTransform t = crop_transform(lm, out_width, out_height, g);
  const double c = std::cos(t.angle) / t.scale;
  const double s = std::sin(t.angle) / t.scale;
  kernels::Affine m;
  m.a = c;
  m.b = -s;
  m.c = s;
  m.d = c;
  m.tx = t.source_mid.x - (m.a * t.target_mid.x + m.b * t.target_mid.y);
  m.ty = t.source_mid.y - (m.c * t.target_mid.x + m.d * t.target_mid.y);
  return kernels::warp(image, m, out_width, out_height);
}

int otsu_threshold(const Image<std::uint8_t>& gray) {
  std::array<std::int64_t, 256> hist{};
  for (auto v : gray.pixels()) ++hist[v];
  const double total = static_cast<double>(gray.size());
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += static_cast<double>(i) * hist[static_cast<std::size_t>(i)];
  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  int level = 0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += static_cast<double>(t) * hist[static_cast<std::size_t>(t)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      level = t;
    }
  }
  return level;
}

SignatureExtraction signature_extract(const Raster& image) {
  if (image.empty()) throw FaceFilterError("signature_extract: empty image");
  // Transparent regions count as paper.
  Image<std::uint8_t> gray(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const Rgba p = image.pixels()[i];
    const unsigned a = p.a;
    gray.pixels()[i] = static_cast<std::uint8_t>((luma(p) * a + 255u * (255u - a) + 127u) / 255u);
  }

  SignatureExtraction out;
  out.threshold = otsu_threshold(gray);
  out.mask = BinaryMask(image.width(), image.height());
  out.ink = Raster(image.width(), image.height());

  // A page without ink has a single grey level or only low-contrast noise.
  constexpr double kMinInkContrast = 32.0;
  double fg_sum = 0.0;
  double bg_sum = 0.0;
  long fg = 0;
  long bg = 0;
  for (auto v : gray.pixels()) {
    if (v <= out.threshold) {
      fg_sum += v;
      ++fg;
    } else {
      bg_sum += v;
      ++bg;
    }
  }
  if (fg == 0 || bg == 0 || bg_sum / bg - fg_sum / fg < kMinInkContrast) {
    out.blank = true;
    return out;
  }
  for (std::size_t i = 0; i < gray.size(); ++i) {
    if (gray.pixels()[i] <= out.threshold) {
      out.mask.pixels()[i] = 1;
      out.ink.pixels()[i] = {0, 0, 0, 255};
    }
  }
  out.foreground_pixels = fg;
  return out;
}

}  // namespace synthpass
