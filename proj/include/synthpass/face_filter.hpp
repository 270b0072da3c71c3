#pragma once

// Face-image quality filtering, ICAO-style portrait cropping and signature extraction.

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthpass/core/image.hpp"

namespace synthpass {

class FaceFilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eye centres and face box in continuous pixel coordinates of the source image.
struct Landmarks {
  PointF left_eye;   // smaller x in image coordinates
  PointF right_eye;
  Rect face_bbox;
  std::string source;

  /// Empty string when valid, otherwise the broken invariant.
  std::string check() const;
};

/// Source of landmarks for an image. Plug a real detector in behind this.
class LandmarkProvider {
 public:
  virtual ~LandmarkProvider() = default;
  virtual std::optional<Landmarks> detect(const std::filesystem::path& image_path, const Raster& image) const = 0;
};

/// Reads `<image>.landmarks.json` next to each image.
class SidecarLandmarkProvider final : public LandmarkProvider {
 public:
  std::optional<Landmarks> detect(const std::filesystem::path& image_path, const Raster& image) const override;

  static std::filesystem::path sidecar_path(const std::filesystem::path& image_path);
  static Landmarks read(const std::filesystem::path& sidecar);
  static void write(const std::filesystem::path& sidecar, const Landmarks& lm);
};

struct QualityThresholds {
  int min_bbox_pixels = 180;
  double min_eye_distance_ratio = 0.12;
  double min_eye_margin_ratio = 0.10;
  double min_sharpness = 3.0;

  std::string check() const;
};

struct Criterion {
  double value = 0.0;
  bool pass = false;
};

struct QualityReport {
  Criterion bbox_pixels;
  Criterion eye_distance_ratio;
  Criterion eye_margin_ratio;
  Criterion sharpness;
  double rank_score = -std::numeric_limits<double>::infinity();
  bool overall_pass = false;
};

/// Variance of the 4-neighbour Laplacian of the luma image over `region`.
double sharpness(const Raster& image, const Rect& region);

QualityReport assess(const Raster& image, const Landmarks& landmarks, const QualityThresholds& thresholds);

struct Candidate {
  Raster image;
  Landmarks landmarks;
  std::string id;
};

struct Selection {
  std::vector<std::size_t> chosen;      // indices into the candidate list, best first
  std::vector<QualityReport> reports;   // one per candidate, input order
  bool short_of_k = false;              // fewer than k candidates passed
  bool no_passing_candidates = false;
};

/// Keeps up to k passing candidates ordered by rank score; ties keep input order.
/// Assessment fans out over candidates; the merge is order-stable.
Selection rank_and_select(const std::vector<Candidate>& candidates, const QualityThresholds& thresholds, std::size_t k);

struct CropGeometry {
  double eye_line_from_bottom = 0.55;  // fraction of output height
  double inter_eye_width = 0.25;       // fraction of output width
};

/// Similarity transform placing the eyes on the crop geometry; maps output -> source coordinates.
struct CropTransform {
  double scale = 1.0;  // output pixels per source pixel
  double angle = 0.0;  // radians, source eye-line angle
  PointF source_mid;
  PointF target_mid;
  PointF target_left;
  PointF target_right;

  PointF to_output(PointF src) const;
  PointF to_source(PointF out) const;
};

CropTransform crop_transform(const Landmarks& landmarks, int out_width, int out_height, const CropGeometry& geometry = {});

/// Portrait crop with eyes levelled and placed per `geometry`; out-of-image areas replicate the edge.
Raster crop_icao(const Raster& image, const Landmarks& landmarks, int out_width, int out_height,
                 const CropGeometry& geometry = {});

struct SignatureExtraction {
  Raster ink;          // black strokes, transparent background
  BinaryMask mask;     // 1 = ink
  int threshold = 0;   // Otsu level; ink is luma <= threshold
  long foreground_pixels = 0;
  bool blank = false;
};

/// Otsu's threshold over a 256-bin histogram; returns the level maximizing between-class variance.
int otsu_threshold(const Image<std::uint8_t>& gray);

SignatureExtraction signature_extract(const Raster& image);

}  // namespace synthpass
