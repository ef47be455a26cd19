#include "ftrs/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ftrs/error.hpp"

namespace ftrs {

namespace {

double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (360.0 - r < 1e-9) r = 0.0;
  return r;
}

// Signed difference a - b on the 180 degree circle, in (-90, 90].
double diff180(double a, double b) {
  double d = std::fmod(a - b, 180.0);
  if (d <= -90.0) d += 180.0;
  if (d > 90.0) d -= 180.0;
  return d;
}

}  // namespace

// --- FrameRotation ---------------------------------------------------------

FrameRotation FrameRotation::clockwise(int width, int height, double degrees) {
  FrameRotation r;
  r.in_w_ = width;
  r.in_h_ = height;
  r.deg_ = wrap360(degrees);
  const double q = r.deg_ / 90.0;
  if (std::fabs(q - std::round(q)) < 1e-9) {
    r.quarter_turns_ = static_cast<int>(std::lround(q)) % 4;
    const bool swap = r.quarter_turns_ % 2 == 1;
    r.out_w_ = swap ? height : width;
    r.out_h_ = swap ? width : height;
  } else {
    const double rad = r.deg_ * M_PI / 180.0;
    const double c = std::fabs(std::cos(rad)), s = std::fabs(std::sin(rad));
    r.out_w_ = static_cast<int>(std::ceil(width * c + height * s - 1e-9));
    r.out_h_ = static_cast<int>(std::ceil(width * s + height * c - 1e-9));
  }
  return r;
}

Point FrameRotation::map(Point p) const {
  const double W = in_w_, H = in_h_;
  switch (quarter_turns_) {
    case 0: return p;
    case 1: return {H - p.y, p.x};
    case 2: return {W - p.x, H - p.y};
    case 3: return {p.y, W - p.x};
    default: break;
  }
  const Point q = rotate_cw(p, {W / 2.0, H / 2.0}, deg_);
  return {q.x - W / 2.0 + out_w_ / 2.0, q.y - H / 2.0 + out_h_ / 2.0};
}

Box FrameRotation::map(const Box& b) const {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Point& c : corners(b)) {
    const Point m = map(c);
    x0 = std::min(x0, m.x), y0 = std::min(y0, m.y);
    x1 = std::max(x1, m.x), y1 = std::max(y1, m.y);
  }
  return clamp_to({x0, y0, x1 - x0, y1 - y0}, out_w_, out_h_);
}

// --- segmentation ------------------------------------------------------------

std::vector<RawTicketImage> segment_regions(const RawTicketImage& raw, double dedup_overlap) {
  if (raw.ticket_boxes.empty()) throw Error(ErrorCode::NoTicketRegion, "no ticket region detected in " + raw.id);

  std::vector<std::size_t> order(raw.ticket_boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw.ticket_boxes[a].score > raw.ticket_boxes[b].score;
  });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return overlap_ratio(raw.ticket_boxes[i].box, raw.ticket_boxes[k].box) > dedup_overlap;
    });
    if (!duplicate) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());

  std::vector<RawTicketImage> crops;
  for (std::size_t n = 0; n < kept.size(); ++n) {
    const TicketBox& tb = raw.ticket_boxes[kept[n]];
    const Box frame = clamp_to(tb.box, raw.width_px, raw.height_px);
    RawTicketImage crop;
    crop.id = kept.size() == 1 ? raw.id : raw.id + "#" + std::to_string(n + 1);
    crop.width_px = std::max(1, static_cast<int>(std::lround(frame.w)));
    crop.height_px = std::max(1, static_cast<int>(std::lround(frame.h)));
    crop.ticket_boxes.push_back({{0, 0, double(crop.width_px), double(crop.height_px)}, tb.score});
    if (raw.edges) {
      EdgeRaster edges(crop.width_px, crop.height_px);
      for (auto [x, y] : raw.edges->pixels()) edges.set(x - int(std::lround(frame.x)), y - int(std::lround(frame.y)));
      crop.edges = std::move(edges);
    }
    if (raw.ground_truth) {
      GroundTruth gt = *raw.ground_truth;
      gt.regions.clear();
      for (const TextRegion& r : raw.ground_truth->regions) {
        if (!contains(frame, {r.bbox.cx(), r.bbox.cy()})) continue;
        TextRegion moved = r;
        moved.bbox = clamp_to({r.bbox.x - frame.x, r.bbox.y - frame.y, r.bbox.w, r.bbox.h}, crop.width_px,
                              crop.height_px);
        gt.regions.push_back(std::move(moved));
      }
      crop.ground_truth = std::move(gt);
    }
    crops.push_back(std::move(crop));
  }
  return crops;
}

// --- Hough transform -----------------------------------------------------------

namespace {

struct Accumulator {
  int n_theta = 0, n_rho = 0, offset = 0;
  double angle_res = 1.0, rho_res = 1.0;
  std::vector<int> votes;

  int at(int t, int r) const { return votes[std::size_t(t) * n_rho + r]; }
};

Accumulator accumulate(const EdgeRaster& raster, double angle_res, double rho_res) {
  Accumulator acc;
  acc.angle_res = angle_res;
  acc.rho_res = rho_res;
  acc.n_theta = std::max(1, static_cast<int>(std::lround(180.0 / angle_res)));
  const double diag = std::hypot(double(raster.width()), double(raster.height()));
  acc.offset = static_cast<int>(std::ceil(diag / rho_res)) + 1;
  acc.n_rho = 2 * acc.offset + 1;
  acc.votes.assign(std::size_t(acc.n_theta) * acc.n_rho, 0);
  std::vector<double> cs(acc.n_theta), sn(acc.n_theta);
  for (int t = 0; t < acc.n_theta; ++t) {
    const double rad = t * angle_res * M_PI / 180.0;
    cs[t] = std::cos(rad) / rho_res;
    sn[t] = std::sin(rad) / rho_res;
  }
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      if (!raster.test(x, y)) continue;
      for (int t = 0; t < acc.n_theta; ++t) {
        const int r = static_cast<int>(std::lround(x * cs[t] + y * sn[t])) + acc.offset;
        ++acc.votes[std::size_t(t) * acc.n_rho + r];
      }
    }
  }
  return acc;
}

}  // namespace

std::vector<HoughPeak> hough_lines(const EdgeRaster& raster, int top_k, double angle_res_deg, double rho_res_px) {
  if (raster.empty() || raster.count() == 0) throw Error(ErrorCode::EmptyRaster, "raster has no set pixel");
  if (angle_res_deg <= 0 || rho_res_px <= 0 || top_k < 1)
    throw Error(ErrorCode::InvalidArgument, "hough resolutions and top_k must be positive");
  const Accumulator acc = accumulate(raster, angle_res_deg, rho_res_px);

  struct Cell {
    int t, r, v;
  };
  std::vector<Cell> peaks;
  for (int t = 0; t < acc.n_theta; ++t) {
    for (int r = 0; r < acc.n_rho; ++r) {
      const int v = acc.at(t, r);
      if (v == 0) continue;
      bool is_peak = true;
      const long self = long(t) * acc.n_rho + r;
      for (int dt = -1; dt <= 1 && is_peak; ++dt) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (dt == 0 && dr == 0) continue;
          int nt = t + dt, nr = r + dr;
          // Crossing the 0/180 seam flips the sign of rho.
          if (nt < 0 || nt >= acc.n_theta) {
            nt = (nt + acc.n_theta) % acc.n_theta;
            nr = acc.n_rho - 1 - nr;
          }
          if (nr < 0 || nr >= acc.n_rho) continue;
          const int nv = acc.at(nt, nr);
          const long other = long(nt) * acc.n_rho + nr;
          if (nv > v || (nv == v && other < self)) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) peaks.push_back({t, r, v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Cell& a, const Cell& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.t != b.t) return a.t < b.t;
    return a.r < b.r;
  });
  if (static_cast<int>(peaks.size()) > top_k) peaks.resize(top_k);

  const auto pixels = raster.pixels();
  std::vector<HoughPeak> out;
  for (const Cell& c : peaks) {
    // Refine the bin angle by the principal direction of the pixels near the
    // line, re-selecting the inliers around each fitted line.
    const double bin_normal = c.t * angle_res_deg;
    double normal = bin_normal, rho = (c.r - acc.offset) * rho_res_px;
    const double band = 1.5 * rho_res_px;
    for (int iter = 0; iter < 4; ++iter) {
      const double rad = normal * M_PI / 180.0, cs = std::cos(rad), sn = std::sin(rad);
      double n = 0, mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (auto [x, y] : pixels)
        if (std::fabs(x * cs + y * sn - rho) <= band) ++n, mx += x, my += y;
      if (n < 2) break;
      mx /= n, my /= n;
      for (auto [x, y] : pixels) {
        if (std::fabs(x * cs + y * sn - rho) > band) continue;
        sxx += (x - mx) * (x - mx), syy += (y - my) * (y - my), sxy += (x - mx) * (y - my);
      }
      const double dir_deg = 0.5 * std::atan2(2 * sxy, sxx - syy) * 180.0 / M_PI;
      normal = bin_normal + std::clamp(diff180(dir_deg + 90.0, bin_normal), -2 * angle_res_deg, 2 * angle_res_deg);
      const double nrad = normal * M_PI / 180.0;
      rho = mx * std::cos(nrad) + my * std::sin(nrad);
    }
    double dir = std::fmod(normal + 90.0 + 180.0, 180.0);
    out.push_back({dir, (c.r - acc.offset) * rho_res_px, c.v});
  }
  return out;
}

EdgeRaster overlay_lines(const EdgeRaster& raster, std::span<const HoughPeak> peaks) {
  EdgeRaster out = raster;
  for (const HoughPeak& p : peaks) {
    const double normal = (p.angle_deg + 90.0) * M_PI / 180.0;
    const double c = std::cos(normal), s = std::sin(normal);
    if (std::fabs(s) >= std::fabs(c)) {
      for (int x = 0; x < raster.width(); ++x)
        out.set(x, static_cast<int>(std::lround((p.rho_px - x * c) / s)));
    } else {
      for (int y = 0; y < raster.height(); ++y)
        out.set(static_cast<int>(std::lround((p.rho_px - y * s) / c)), y);
    }
  }
  return out;
}

// --- rotation ---------------------------------------------------------------------

RawTicketImage rotate_clockwise(const RawTicketImage& image, double degrees) {
  const FrameRotation rot = FrameRotation::clockwise(image.width_px, image.height_px, degrees);
  RawTicketImage out;
  out.id = image.id;
  out.width_px = rot.out_width();
  out.height_px = rot.out_height();
  for (const TicketBox& tb : image.ticket_boxes) out.ticket_boxes.push_back({rot.map(tb.box), tb.score});
  if (image.edges) {
    EdgeRaster edges(out.width_px, out.height_px);
    for (auto [x, y] : image.edges->pixels()) {
      const Point m = rot.map(Point{x + 0.5, y + 0.5});
      edges.set(static_cast<int>(std::floor(m.x)), static_cast<int>(std::floor(m.y)));
    }
    out.edges = std::move(edges);
  }
  if (image.ground_truth) {
    GroundTruth gt = *image.ground_truth;
    for (TextRegion& r : gt.regions) r.bbox = rot.map(r.bbox);
    out.ground_truth = std::move(gt);
  }
  return out;
}

double correction_angle(int class_k, int n_class) {
  return wrap360((n_class - class_k) * (360.0 / n_class));
}

RawTicketImage rotate_by_classes(const RawTicketImage& image, int k, int n_class) {
  RawTicketImage out = rotate_clockwise(image, k * (360.0 / n_class));
  if (out.ground_truth) {
    int& cls = out.ground_truth->rotation_class;
    cls = ((cls + k) % n_class + n_class) % n_class;
  }
  return out;
}

RotationEstimate detect_rotation(const RawTicketImage& ticket, const RotationClassifier& classifier,
                                 const PipelineConfig& cfg) {
  if (classifier.n_class() != cfg.n_class)
    throw Error(ErrorCode::InvalidArgument, "rotation classifier n_class " + std::to_string(classifier.n_class()) +
                                                " differs from configured " + std::to_string(cfg.n_class));
  return classifier.estimate(ticket);
}

RawTicketImage correct_direction(const RawTicketImage& ticket, const RotationEstimate& estimate,
                                 const PipelineConfig& cfg) {
  const int n = cfg.n_class;
  return rotate_by_classes(ticket, ((n - estimate.class_k) % n + n) % n, n);
}

std::vector<std::pair<RawTicketImage, int>> build_rotation_training_set(std::span<const RawTicketImage> upright,
                                                                        int n_class) {
  if (n_class < 2) throw Error(ErrorCode::InvalidClassCount, "n_class must be at least 2");
  std::vector<std::pair<RawTicketImage, int>> out;
  out.reserve(upright.size() * n_class);
  for (const RawTicketImage& img : upright)
    for (int label = 0; label < n_class; ++label) out.emplace_back(rotate_by_classes(img, label, n_class), label);
  return out;
}

// --- classifiers ---------------------------------------------------------------

RotationEstimate OracleRotationClassifier::estimate(const RawTicketImage& ticket) const {
  if (!ticket.ground_truth) throw Error(ErrorCode::ClassifierUnavailable, "oracle needs fixture ground truth");
  return {((ticket.ground_truth->rotation_class % n_class_) + n_class_) % n_class_, 1.0};
}

double HoughOrientationClassifier::dominant_angle(const EdgeRaster& raster) const {
  const auto peaks = hough_lines(raster, opts_.top_k, opts_.angle_res_deg, opts_.rho_res_px);
  const EdgeRaster enhanced = overlay_lines(raster, peaks);
  const auto refined = hough_lines(enhanced, opts_.top_k, opts_.angle_res_deg, opts_.rho_res_px);
  // Vote-weighted mean over peaks agreeing with the strongest direction.
  const double top = refined.front().angle_deg;
  double sum = 0.0, weight = 0.0;
  for (const HoughPeak& p : refined) {
    const double d = diff180(p.angle_deg, top);
    if (std::fabs(d) <= 2.0 * opts_.angle_res_deg) {
      sum += p.votes * d;
      weight += p.votes;
    }
  }
  double angle = std::fmod(top + sum / weight + 180.0, 180.0);
  return angle;
}

RotationEstimate HoughOrientationClassifier::estimate(const RawTicketImage& ticket) const {
  if (!ticket.edges || ticket.edges->count() == 0)
    throw Error(ErrorCode::ClassifierUnavailable, "hough classifier needs an edge raster for " + ticket.id);
  const int n = opts_.n_class;
  const double theta = 360.0 / n;
  const double angle = dominant_angle(*ticket.edges);

  auto snap = [&](double a) { return static_cast<int>(std::lround(a / theta)) % n; };
  const int k1 = snap(angle);
  const int k2 = snap(angle + 180.0);
  const double residual = std::fabs(diff180(angle, k1 * theta));
  const double snap_conf =
      std::clamp(1.0 - std::max(0.0, residual - opts_.angle_res_deg) / (theta / 2.0), 0.0, 1.0);

  // Where the anchor sits between the topmost and bottommost region centres
  // once the candidate correction is applied; 0 = top.
  auto anchor_fraction = [&](int k) -> std::optional<double> {
    if (!ticket.ground_truth) return std::nullopt;
    const auto& regions = ticket.ground_truth->regions;
    const auto anchor = std::find_if(regions.begin(), regions.end(), [](const TextRegion& r) { return r.anchor; });
    if (anchor == regions.end() || regions.size() < 2) return std::nullopt;
    const FrameRotation rot = FrameRotation::clockwise(ticket.width_px, ticket.height_px, correction_angle(k, n));
    double lo = 1e300, hi = -1e300;
    for (const TextRegion& r : regions) {
      const double cy = rot.map(Point{r.bbox.cx(), r.bbox.cy()}).y;
      lo = std::min(lo, cy), hi = std::max(hi, cy);
    }
    if (hi - lo < 1e-9) return std::nullopt;
    return (rot.map(Point{anchor->bbox.cx(), anchor->bbox.cy()}).y - lo) / (hi - lo);
  };

  const auto f1 = anchor_fraction(k1);
  const auto f2 = anchor_fraction(k2);
  const bool ok1 = f1 && *f1 <= opts_.anchor_band;
  const bool ok2 = f2 && *f2 <= opts_.anchor_band;
  if (ok1 != ok2) return {ok1 ? k1 : k2, snap_conf};
  const int pick = (f2 && (!f1 || *f2 < *f1)) ? k2 : k1;
  return {pick, snap_conf * opts_.ambiguous_confidence};
}

}  // namespace ftrs
