#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ftrs/types.hpp"

namespace ftrs {

struct RotationEstimate {
  int class_k = 0;
  double confidence = 0.0;
};

struct HoughPeak {
  double angle_deg = 0.0;  // line direction in [0, 180), 0 = horizontal
  double rho_px = 0.0;
  int votes = 0;
};

class RotationClassifier {
 public:
  virtual ~RotationClassifier() = default;
  virtual int n_class() const = 0;
  virtual RotationEstimate estimate(const RawTicketImage& ticket) const = 0;
};

/// Reports the rotation class planted in fixture ground truth.
class OracleRotationClassifier final : public RotationClassifier {
 public:
  explicit OracleRotationClassifier(int n_class) : n_class_(n_class) {}
  int n_class() const override { return n_class_; }
  RotationEstimate estimate(const RawTicketImage& ticket) const override;

 private:
  int n_class_;
};

/// Baseline orientation classifier: dominant text-line angle from a Hough
/// accumulator, snapped to the class grid, with the 180 degree ambiguity
/// resolved by where the anchor (title) region lands after correction.
class HoughOrientationClassifier final : public RotationClassifier {
 public:
  struct Options {
    int n_class = 8;
    int top_k = 8;
    double angle_res_deg = 1.0;
    double rho_res_px = 1.0;
    double anchor_band = 0.25;
    double ambiguous_confidence = 0.5;
  };

  explicit HoughOrientationClassifier(Options opts) : opts_(opts) {}
  int n_class() const override { return opts_.n_class; }
  RotationEstimate estimate(const RawTicketImage& ticket) const override;

  /// Dominant line direction in [0, 180) after line enhancement.
  double dominant_angle(const EdgeRaster& raster) const;

 private:
  Options opts_;
};

/// Coordinate map for a clockwise rotation of a W x H frame. Multiples of 90
/// degrees map exactly; other angles rotate about the centre into the hull frame.
class FrameRotation {
 public:
  static FrameRotation clockwise(int width, int height, double degrees);

  Point map(Point p) const;
  Box map(const Box& b) const;
  int out_width() const { return out_w_; }
  int out_height() const { return out_h_; }
  double degrees() const { return deg_; }

 private:
  int in_w_ = 0, in_h_ = 0, out_w_ = 0, out_h_ = 0;
  double deg_ = 0.0;
  int quarter_turns_ = -1;  // >= 0 when deg_ is a multiple of 90
};

std::vector<RawTicketImage> segment_regions(const RawTicketImage& raw, double dedup_overlap = 0.9);

std::vector<HoughPeak> hough_lines(const EdgeRaster& raster, int top_k, double angle_res_deg = 1.0,
                                   double rho_res_px = 1.0);

/// Draws the given peaks' lines onto a copy of the raster.
EdgeRaster overlay_lines(const EdgeRaster& raster, std::span<const HoughPeak> peaks);

RawTicketImage rotate_clockwise(const RawTicketImage& image, double degrees);

/// Rotates by `k` class steps and advances the planted rotation class.
RawTicketImage rotate_by_classes(const RawTicketImage& image, int k, int n_class);

/// ((n_class - class_k) * theta) mod 360.
double correction_angle(int class_k, int n_class);

RotationEstimate detect_rotation(const RawTicketImage& ticket, const RotationClassifier& classifier,
                                 const PipelineConfig& cfg);

RawTicketImage correct_direction(const RawTicketImage& ticket, const RotationEstimate& estimate,
                                 const PipelineConfig& cfg);

std::vector<std::pair<RawTicketImage, int>> build_rotation_training_set(std::span<const RawTicketImage> upright,
                                                                        int n_class);

}  // namespace ftrs
