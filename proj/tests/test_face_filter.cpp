#include <cmath>
#include <map>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "synthpass/core/png_io.hpp"
#include "synthpass/core/rng.hpp"
#include "synthpass/face_filter.hpp"
#include "synthpass/kernels.hpp"

using namespace synthpass;
namespace fs = std::filesystem;

namespace {

Landmarks lm(double lx, double ly, double rx, double ry, Rect box) { return {{lx, ly}, {rx, ry}, box, "test"}; }

Raster checkerboard(int w, int h, int cell) {
  Raster img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t v = ((x / cell) + (y / cell)) % 2 ? 230 : 20;
      img.at(x, y) = {v, v, v, 255};
    }
  }
  return img;
}

// Direct 4-neighbour Laplacian variance on BT.601 luma, replicated borders.
double oracle_sharpness(const Raster& img, Rect r) {
  auto g = [&](int x, int y) {
    const Rgba& p = img.clamped(x, y);
    return std::floor((299.0 * p.r + 587.0 * p.g + 114.0 * p.b + 500.0) / 1000.0);
  };
  double s = 0, s2 = 0;
  long n = 0;
  for (int y = r.y; y < r.bottom(); ++y) {
    for (int x = r.x; x < r.right(); ++x) {
      const double v = g(x - 1, y) + g(x + 1, y) + g(x, y - 1) + g(x, y + 1) - 4 * g(x, y);
      s += v;
      s2 += v * v;
      ++n;
    }
  }
  return s2 / n - (s / n) * (s / n);
}

Raster random_texture(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Raster img(w, h);
  for (auto& p : img.pixels()) {
    const auto v = static_cast<std::uint8_t>(rng.below(256));
    p = {v, static_cast<std::uint8_t>(255 - v), static_cast<std::uint8_t>(v / 2), 255};
  }
  return img;
}

// Two bright dots on a dark field, centred at continuous coordinates.
Raster dots(int w, int h, PointF a, PointF b) {
  Raster img(w, h, {0, 0, 0, 255});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 0;
      for (PointF c : {a, b}) {
        const double dx = x + 0.5 - c.x, dy = y + 0.5 - c.y;
        v += std::exp(-(dx * dx + dy * dy) / (2 * 2.5 * 2.5));
      }
      const auto u = static_cast<std::uint8_t>(std::lround(std::min(1.0, v) * 255));
      img.at(x, y) = {u, u, u, 255};
    }
  }
  return img;
}

PointF centroid(const Raster& img, Rect r) {
  double sx = 0, sy = 0, sw = 0;
  for (int y = std::max(0, r.y); y < std::min(img.height(), r.bottom()); ++y) {
    for (int x = std::max(0, r.x); x < std::min(img.width(), r.right()); ++x) {
      const double v = img.at(x, y).r;
      if (v < 40) continue;
      sx += v * (x + 0.5);
      sy += v * (y + 0.5);
      sw += v;
    }
  }
  return {sx / sw, sy / sw};
}

}  // namespace

TEST_CASE("eye distance ratio and margins") {
  Raster img(1000, 800, {128, 128, 128, 255});
  const auto r = assess(img, lm(100, 200, 300, 200, {50, 100, 400, 400}), QualityThresholds{});
  CHECK(r.eye_distance_ratio.value == doctest::Approx(0.2));
  CHECK(r.eye_margin_ratio.value == doctest::Approx(0.1));
  CHECK(r.bbox_pixels.value == 400);
}

TEST_CASE("uniform image has zero sharpness and fails") {
  Raster img(400, 400, {90, 90, 90, 255});
  const auto r = assess(img, lm(150, 180, 250, 180, {100, 100, 200, 220}), QualityThresholds{});
  CHECK(r.sharpness.value == 0.0);
  CHECK_FALSE(r.sharpness.pass);
  CHECK_FALSE(r.overall_pass);
  CHECK(std::isinf(r.rank_score));
  CHECK(r.rank_score < 0);
}

TEST_CASE("sharpness equals a direct laplacian computation") {
  const Raster cb = checkerboard(120, 100, 7);
  const Rect box{10, 10, 90, 80};
  CHECK(sharpness(cb, box) == doctest::Approx(oracle_sharpness(cb, box)).epsilon(1e-12));
  const Raster blurred = kernels::blur(cb, 1.5);
  CHECK(sharpness(blurred, box) == doctest::Approx(oracle_sharpness(blurred, box)).epsilon(1e-12));
  CHECK(sharpness(cb, box) > sharpness(blurred, box));
}

TEST_CASE("blurring never increases sharpness") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Raster base = seed % 2 ? random_texture(96, 80, seed) : checkerboard(96, 80, static_cast<int>(seed));
    const Rect box{0, 0, 96, 80};
    double prev = sharpness(base, box);
    for (double sigma : {0.5, 1.0, 1.7, 3.0}) {
      const double s = sharpness(kernels::blur(base, sigma), box);
      CAPTURE(seed);
      CAPTURE(sigma);
      CHECK(s <= prev);
      prev = s;
    }
  }
}

TEST_CASE("rank_and_select keeps the sharpest passing candidates") {
  std::vector<Candidate> cands;
  const Landmarks good = lm(150, 200, 250, 200, {90, 110, 220, 260});
  // Two geometry failures, five passing candidates with decreasing sharpness by blur.
  const Raster base = checkerboard(400, 500, 5);
  for (double sigma : {1.0, 0.0, 2.0, 0.5, 1.5}) {
    cands.push_back({sigma > 0 ? kernels::blur(base, sigma) : base, good, "sigma" + std::to_string(sigma)});
  }
  cands.push_back({base, lm(150, 200, 170, 200, {90, 110, 220, 260}), "close_eyes"});
  cands.push_back({base, lm(150, 200, 250, 200, {140, 190, 120, 30}), "small_box"});
  const auto sel = rank_and_select(cands, QualityThresholds{}, 3);
  CHECK(sel.chosen == std::vector<std::size_t>{1, 3, 0});
  CHECK_FALSE(sel.short_of_k);
  CHECK_FALSE(sel.reports[5].overall_pass);
  CHECK_FALSE(sel.reports[6].overall_pass);
  for (auto i : sel.chosen) {
    const auto& r = sel.reports[i];
    CHECK(r.bbox_pixels.pass);
    CHECK(r.eye_distance_ratio.pass);
    CHECK(r.eye_margin_ratio.pass);
    CHECK(r.sharpness.pass);
  }
}

TEST_CASE("rank_and_select edge cases") {
  const Landmarks good = lm(150, 200, 250, 200, {90, 110, 220, 260});
  const Raster flat(400, 500, {100, 100, 100, 255});
  const auto none = rank_and_select({{flat, good, "a"}, {flat, good, "b"}}, QualityThresholds{}, 3);
  CHECK(none.chosen.empty());
  CHECK(none.no_passing_candidates);
  CHECK(none.short_of_k);

  const Raster cb = checkerboard(400, 500, 4);
  const auto ties = rank_and_select({{cb, good, "a"}, {cb, good, "b"}, {cb, good, "c"}}, QualityThresholds{}, 3);
  CHECK(ties.chosen == std::vector<std::size_t>{0, 1, 2});

  CHECK_THROWS_AS(rank_and_select({}, QualityThresholds{}, 0), FaceFilterError);

  // A broken candidate surfaces as an exception from the parallel assessment.
  const Landmarks broken = lm(10, 10, 20, 10, {100, 100, 50, 50});
  CHECK_THROWS_AS(rank_and_select({{cb, good, "a"}, {cb, broken, "b"}}, QualityThresholds{}, 1), FaceFilterError);
}

TEST_CASE("filter soundness on random candidates") {
  Rng rng(77);
  QualityThresholds t;
  std::vector<Candidate> cands;
  for (int i = 0; i < 40; ++i) {
    const int w = 300 + static_cast<int>(rng.below(200));
    const int h = 350 + static_cast<int>(rng.below(200));
    const double lx = rng.uniform(5, w / 2.0), rx = lx + rng.uniform(5, w / 2.0 - 5);
    const double y = rng.uniform(5, h - 5.0);
    const int bx = static_cast<int>(lx) - 5, by = static_cast<int>(y) - 5;
    const Rect box{bx, by, static_cast<int>(rx - lx) + 10 + static_cast<int>(rng.below(200)), 10 + static_cast<int>(rng.below(300))};
    Raster img = random_texture(w, h, 1000 + i);
    if (rng.coin()) img = kernels::blur(img, rng.uniform(0.5, 8));
    cands.push_back({img, lm(lx, y, rx, y, box), std::to_string(i)});
  }
  const auto sel = rank_and_select(cands, t, 3);
  for (auto i : sel.chosen) {
    const auto& c = cands[i];
    const auto& b = c.landmarks.face_bbox;
    CHECK(std::min(b.w, b.h) >= t.min_bbox_pixels);
    CHECK(std::hypot(c.landmarks.right_eye.x - c.landmarks.left_eye.x, 0.0) / c.image.width() >= t.min_eye_distance_ratio);
    CHECK(sharpness(c.image, b) >= t.min_sharpness);
  }
  for (std::size_t i = 1; i < sel.chosen.size(); ++i) {
    CHECK(sel.reports[sel.chosen[i - 1]].rank_score >= sel.reports[sel.chosen[i]].rank_score);
  }
}

TEST_CASE("assess rejects invalid landmarks") {
  Raster img(100, 100, {1, 1, 1, 255});
  CHECK_THROWS_AS(assess(img, lm(10, 10, 20, 10, {0, 0, 0, 50}), {}), FaceFilterError);
  CHECK_THROWS_AS(assess(img, lm(30, 10, 20, 10, {0, 0, 50, 50}), {}), FaceFilterError);
  CHECK_THROWS_AS(assess(img, lm(10, 10, 90, 10, {0, 0, 50, 50}), {}), FaceFilterError);
  CHECK_THROWS_AS(assess(Raster{}, lm(10, 10, 20, 10, {0, 0, 50, 50}), {}), FaceFilterError);
}

TEST_CASE("crop at the target geometry is a pure rescale") {
  // 200x260 output: eyes at y = 0.45 * 260 = 117, x = 100 -+ 25.
  const Raster src = random_texture(200, 260, 3);
  const Raster out = crop_icao(src, lm(75, 117, 125, 117, {40, 40, 120, 160}), 200, 260);
  CHECK(out == src);
  // Same geometry at half resolution equals the resampled source within rounding.
  const Raster half = crop_icao(src, lm(75, 117, 125, 117, {40, 40, 120, 160}), 400, 520);
  CHECK(half.width() == 400);
}

TEST_CASE("crop near the left border replicates the edge") {
  Raster src(300, 300, {200, 200, 200, 255});
  for (int y = 0; y < 300; ++y) src.at(0, y) = {10, 20, 30, 255};
  for (int y = 0; y < 300; ++y) src.at(1, y) = {10, 20, 30, 255};
  const Raster out = crop_icao(src, lm(20, 150, 60, 150, {0, 100, 100, 100}), 160, 200);
  // The window extends left of the image; those columns replicate column 0.
  CHECK(out.at(0, 100) == Rgba{10, 20, 30, 255});
  CHECK(out.at(5, 10) == Rgba{10, 20, 30, 255});
  CHECK(out.at(150, 100) == Rgba{200, 200, 200, 255});
  CHECK_THROWS_AS(crop_icao(src, lm(20, 150, 20, 150, {0, 100, 100, 100}), 160, 200), FaceFilterError);
}

TEST_CASE("cropped eyes land on the target geometry") {
  Rng rng(31);
  for (int i = 0; i < 25; ++i) {
    const PointF a{rng.uniform(60, 160), rng.uniform(100, 200)};
    const double d = rng.uniform(40, 120), ang = rng.uniform(-0.25, 0.25);
    const PointF b{a.x + d * std::cos(ang), a.y + d * std::sin(ang)};
    const Raster src = dots(360, 400, a, b);
    const int ow = 240 + static_cast<int>(rng.below(200)), oh = 300 + static_cast<int>(rng.below(200));
    const auto t = crop_transform(lm(a.x, a.y, b.x, b.y, {0, 0, 360, 400}), ow, oh);
    const Raster out = crop_icao(src, lm(a.x, a.y, b.x, b.y, {0, 0, 360, 400}), ow, oh);
    const double ex = 0.25 * ow / 2, ey = 0.45 * oh;
    CHECK(t.target_left.x == doctest::Approx(ow / 2.0 - ex));
    CHECK(t.target_left.y == doctest::Approx(ey));
    const int rad = std::max(8, static_cast<int>(0.08 * ow));
    const PointF l = centroid(out, {static_cast<int>(ow / 2.0 - ex) - rad, static_cast<int>(ey) - rad, 2 * rad, 2 * rad});
    const PointF r = centroid(out, {static_cast<int>(ow / 2.0 + ex) - rad, static_cast<int>(ey) - rad, 2 * rad, 2 * rad});
    CAPTURE(i);
    CHECK(std::abs(l.x - (ow / 2.0 - ex)) <= 1.0);
    CHECK(std::abs(l.y - ey) <= 1.0);
    CHECK(std::abs(r.x - (ow / 2.0 + ex)) <= 1.0);
    CHECK(std::abs(r.y - ey) <= 1.0);
  }
}

TEST_CASE("fixture faces crop with eyes on target") {
  const fs::path dir = testsupport::fixtures() / "faces";
  for (const char* name : {"s1_5.png", "s2_1.png", "s3_3.png"}) {
    const Landmarks l = SidecarLandmarkProvider::read(SidecarLandmarkProvider::sidecar_path(dir / name));
    const auto t = crop_transform(l, 400, 520);
    const PointF le = t.to_output(l.left_eye), re = t.to_output(l.right_eye);
    CHECK(std::abs(le.x - 150) <= 1.0);
    CHECK(std::abs(re.x - 250) <= 1.0);
    CHECK(std::abs(le.y - 234) <= 1.0);
    CHECK(std::abs(re.y - 234) <= 1.0);
    const PointF back = t.to_source(le);
    CHECK(back.x == doctest::Approx(l.left_eye.x));
  }
}

TEST_CASE("signature extraction") {
  Raster img(60, 40, {250, 250, 250, 255});
  BinaryMask stroke(60, 40);
  for (int x = 10; x < 50; ++x) {
    for (int y = 18; y < 22; ++y) {
      img.at(x, y) = {15, 15, 40, 255};
      stroke.at(x, y) = 1;
    }
  }
  const auto s = signature_extract(img);
  CHECK_FALSE(s.blank);
  CHECK(s.mask == stroke);
  CHECK(s.foreground_pixels == 160);
  CHECK(s.ink.at(0, 0).a == 0);
  CHECK(s.ink.at(20, 20).a == 255);

  CHECK(signature_extract(Raster(30, 30, {255, 255, 255, 255})).blank);
}

TEST_CASE("fixture signature scans agree with the reference counts") {
  const auto refs = nlohmann::json::parse(testsupport::slurp(testsupport::fixtures() / "golden/signatures.json"));
  REQUIRE(refs.size() == 6);
  for (const auto& [name, ref] : refs.items()) {
    const auto s = signature_extract(read_png(testsupport::fixtures() / "signatures" / name));
    const double expect = ref["ink_pixels"].get<double>();
    CAPTURE(name);
    CHECK(std::abs(s.foreground_pixels - expect) <= 0.05 * expect);
  }
}

TEST_CASE("landmark sidecars round trip") {
  testsupport::ScratchDir dir("lm");
  const Landmarks l = lm(10.25, 20.5, 40.75, 21, {1, 2, 60, 70});
  SidecarLandmarkProvider::write(dir / "a.landmarks.json", l);
  const Landmarks back = SidecarLandmarkProvider::read(dir / "a.landmarks.json");
  CHECK(back.left_eye == l.left_eye);
  CHECK(back.right_eye == l.right_eye);
  CHECK(back.face_bbox == l.face_bbox);
  CHECK_FALSE(SidecarLandmarkProvider().detect(dir / "missing.png", Raster(1, 1)).has_value());
}

TEST_CASE("fixture candidates: top three are the three sharpest passing") {
  const fs::path dir = testsupport::fixtures() / "faces";
  const auto truth = nlohmann::json::parse(testsupport::slurp(dir / "truth.json"));
  std::map<std::string, std::vector<std::pair<std::string, Candidate>>> by_subject;
  SidecarLandmarkProvider provider;
  for (const auto& [name, t] : truth.items()) {
    const Raster img = read_png(dir / name);
    by_subject[t["subject"]].push_back({name, {img, *provider.detect(dir / name, img), name}});
  }
  CHECK(by_subject.size() == 5);
  for (auto& [subject, list] : by_subject) {
    std::sort(list.begin(), list.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<Candidate> cands;
    for (auto& [n, c] : list) cands.push_back(c);
    const auto sel = rank_and_select(cands, QualityThresholds{}, 3);
    REQUIRE(sel.chosen.size() == 3);
    std::vector<double> sigmas;
    for (auto i : sel.chosen) {
      const auto& t = truth[list[i].first];
      CHECK(t["expect"] == "pass");
      sigmas.push_back(t["blur_sigma"].get<double>());
    }
    CAPTURE(subject);
    CHECK(sigmas == std::vector<double>{0.0, 0.8, 1.4});
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const std::string expect = truth[list[i].first]["expect"];
      const auto& r = sel.reports[i];
      if (expect == "sharpness") CHECK_FALSE(r.sharpness.pass);
      if (expect == "bbox_pixels") CHECK_FALSE(r.bbox_pixels.pass);
      if (expect == "eye_margin_ratio") CHECK_FALSE(r.eye_margin_ratio.pass);
      CHECK(r.overall_pass == (expect == "pass"));
    }
  }
}
