#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace ftrs {

/// Axis-aligned box in pixels: origin top-left, y grows downward.
struct Box {
  double x = 0, y = 0, w = 0, h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct Point {
  double x = 0, y = 0;
};

inline double intersection_area(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  return (iw > 0 && ih > 0) ? iw * ih : 0.0;
}

/// Intersection over the smaller of the two areas; 0 when either box is empty.
inline double overlap_ratio(const Box& a, const Box& b) {
  const double smaller = std::min(a.area(), b.area());
  return smaller > 0 ? intersection_area(a, b) / smaller : 0.0;
}

inline bool contains(const Box& b, Point p) {
  return p.x >= b.x && p.x <= b.right() && p.y >= b.y && p.y <= b.bottom();
}

inline Box hull(const Box& a, const Box& b) {
  const double x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.right(), b.right()), y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

inline Box clamp_to(const Box& b, double width, double height) {
  const double x0 = std::clamp(b.x, 0.0, width), y0 = std::clamp(b.y, 0.0, height);
  const double x1 = std::clamp(b.right(), 0.0, width), y1 = std::clamp(b.bottom(), 0.0, height);
  return {x0, y0, x1 - x0, y1 - y0};
}

/// Rotates `p` clockwise on screen (y down) by `deg` about `c`.
inline Point rotate_cw(Point p, Point c, double deg) {
  const double r = deg * M_PI / 180.0;
  const double dx = p.x - c.x, dy = p.y - c.y;
  return {c.x + dx * std::cos(r) - dy * std::sin(r), c.y + dx * std::sin(r) + dy * std::cos(r)};
}

inline std::array<Point, 4> corners(const Box& b) {
  return {Point{b.x, b.y}, Point{b.right(), b.y}, Point{b.right(), b.bottom()}, Point{b.x, b.bottom()}};
}

}  // namespace ftrs
