#pragma once

// Exact 2D polygon primitives in attribute space: orientation, area,
// containment with inclusive boundary, and clipping against axis-aligned
// rectangles (Sutherland-Hodgman).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fiberuq/error.hpp"

namespace fiberuq {

// A point in attribute space (a1, a2).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

using Polygon = std::vector<Vec2>;

inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect2 {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  constexpr double width() const { return x1 - x0; }
  constexpr double height() const { return y1 - y0; }
  constexpr double area() const { return width() * height(); }

  constexpr bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

  // Closed intersection test; touching rectangles intersect.
  constexpr bool intersects(const Rect2& o) const {
    return !(o.x1 < x0 || o.x0 > x1 || o.y1 < y0 || o.y0 > y1);
  }

  constexpr bool contains(const Rect2& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }

  friend constexpr bool operator==(const Rect2&, const Rect2&) = default;
};

inline constexpr double kDegenerateClipArea = 1e-15;
inline constexpr double kOnEdgeEpsilon = 1e-12;

// Shoelace formula. Positive for counterclockwise rings.
inline double signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

inline Rect2 bounding_rect(std::span<const Vec2> poly) {
  Rect2 r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2& p : poly) {
    r.x0 = std::min(r.x0, p.x);
    r.x1 = std::max(r.x1, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  const Vec2 q = a + t * ab;
  return std::hypot(p.x - q.x, p.y - q.y);
}

inline int orientation_sign(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment_collinear(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// Closed segment intersection (touching counts).
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment_collinear(a, b, c)) return true;
  if (o2 == 0 && on_segment_collinear(a, b, d)) return true;
  if (o3 == 0 && on_segment_collinear(c, d, a)) return true;
  if (o4 == 0 && on_segment_collinear(c, d, b)) return true;
  return false;
}

// Index of the first offending edge pair, or {-1,-1} for a simple ring.
inline std::pair<int, int> find_self_intersection(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 c = poly[j];
      const Vec2 d = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one endpoint; they only conflict when they fold back onto each other.
        const Vec2 shared = (j == i + 1) ? b : a;
        const Vec2 p = (j == i + 1) ? a : b;
        const Vec2 q = (j == i + 1) ? d : c;
        if (orientation_sign(p, shared, q) == 0 && dot(p - shared, q - shared) > 0.0) {
          return {static_cast<int>(i), static_cast<int>(j)};
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return {static_cast<int>(i), static_cast<int>(j)};
    }
  }
  return {-1, -1};
}

inline Polygon remove_consecutive_duplicates(Polygon poly) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

enum class ClipSide { kLeft, kRight, kBottom, kTop };

inline bool inside_half_plane(Vec2 p, ClipSide side, double bound) {
  switch (side) {
    case ClipSide::kLeft: return p.x >= bound;
    case ClipSide::kRight: return p.x <= bound;
    case ClipSide::kBottom: return p.y >= bound;
    case ClipSide::kTop: return p.y <= bound;
  }
  return false;
}

// Intersection of segment a-b with the clip line. The clipped coordinate is
// pinned to the bound so clipped edges stay exactly axis-aligned.
inline Vec2 clip_line_intersection(Vec2 a, Vec2 b, ClipSide side, double bound) {
  if (side == ClipSide::kLeft || side == ClipSide::kRight) {
    const double t = (bound - a.x) / (b.x - a.x);
    return {bound, a.y + t * (b.y - a.y)};
  }
  const double t = (bound - a.y) / (b.y - a.y);
  return {a.x + t * (b.x - a.x), bound};
}

inline Polygon clip_half_plane(const Polygon& in, ClipSide side, double bound) {
  Polygon out;
  const std::size_t n = in.size();
  if (n == 0) return out;
  out.reserve(n + 4);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 cur = in[i];
    const Vec2 prev = in[(i + n - 1) % n];
    const bool cur_in = inside_half_plane(cur, side, bound);
    const bool prev_in = inside_half_plane(prev, side, bound);
    if (cur_in) {
      if (!prev_in) out.push_back(clip_line_intersection(prev, cur, side, bound));
      out.push_back(cur);
    } else if (prev_in) {
      out.push_back(clip_line_intersection(prev, cur, side, bound));
    }
  }
  return out;
}

}  // namespace detail

// A validated trait (fiber surface control polygon): simple, nonzero area,
// counterclockwise. Construction normalizes the vertex list.
class TraitPolygon {
 public:
  explicit TraitPolygon(Polygon vertices) : vertices_(normalize(std::move(vertices))) {
    bounds_ = bounding_rect(vertices_);
  }

  const Polygon& vertices() const { return vertices_; }
  std::span<const Vec2> span() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Rect2& bounds() const { return bounds_; }
  double area() const { return signed_area(vertices_); }

  // Drops repeated/closing vertices, validates, and reorients to CCW.
  static Polygon normalize(Polygon vertices) {
    vertices = detail::remove_consecutive_duplicates(std::move(vertices));
    if (vertices.size() < 3) {
      throw InvalidTrait("trait polygon needs at least 3 distinct vertices, got " +
                         std::to_string(vertices.size()));
    }
    for (const Vec2& p : vertices) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidTrait("trait polygon has a non-finite vertex");
    }
    const double area = signed_area(vertices);
    if (area == 0.0) throw InvalidTrait("trait polygon has zero area");
    const auto [ei, ej] = detail::find_self_intersection(vertices);
    if (ei >= 0) {
      throw InvalidTrait("trait polygon is self-intersecting: edge " + std::to_string(ei) + " crosses edge " +
                         std::to_string(ej));
    }
    if (area < 0.0) std::reverse(vertices.begin(), vertices.end());
    return vertices;
  }

 private:
  Polygon vertices_;
  Rect2 bounds_;
};

// Inside or on the boundary. The on-edge tolerance is evaluated in the
// polygon's bounding-box frame so that it does not depend on the offset of
// the attribute range.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> poly, const Rect2& bounds) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  if (p.x < bounds.x0 - kOnEdgeEpsilon || p.x > bounds.x1 + kOnEdgeEpsilon || p.y < bounds.y0 - kOnEdgeEpsilon ||
      p.y > bounds.y1 + kOnEdgeEpsilon) {
    return false;
  }
  const Vec2 origin{bounds.x0, bounds.y0};
  const Vec2 q = p - origin;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i] - origin;
    const Vec2 b = poly[j] - origin;
    if (detail::point_segment_distance(q, a, b) <= kOnEdgeEpsilon) return true;
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x_cross = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline bool point_in_polygon(Vec2 p, const TraitPolygon& trait) {
  return point_in_polygon(p, trait.span(), trait.bounds());
}

// Intersection of a simple CCW polygon with a rectangle. Returns an empty
// polygon for disjoint inputs or tangential contact (area below 1e-15).
inline Polygon clip_to_rect(std::span<const Vec2> poly, const Rect2& r) {
  const Rect2 pb = bounding_rect(poly);
  if (!pb.intersects(r)) return {};
  Polygon out(poly.begin(), poly.end());
  if (r.contains(pb)) return out;
  if (pb.x0 < r.x0) out = detail::clip_half_plane(out, detail::ClipSide::kLeft, r.x0);
  if (pb.x1 > r.x1) out = detail::clip_half_plane(out, detail::ClipSide::kRight, r.x1);
  if (pb.y0 < r.y0) out = detail::clip_half_plane(out, detail::ClipSide::kBottom, r.y0);
  if (pb.y1 > r.y1) out = detail::clip_half_plane(out, detail::ClipSide::kTop, r.y1);
  out = detail::remove_consecutive_duplicates(std::move(out));
  if (out.size() < 3 || signed_area(out) < kDegenerateClipArea) return {};
  return out;
}

inline Polygon clip_to_rect(const TraitPolygon& trait, const Rect2& r) { return clip_to_rect(trait.span(), r); }

inline double overlap_area(std::span<const Vec2> poly, const Rect2& r) {
  const Polygon clipped = clip_to_rect(poly, r);
  return clipped.empty() ? 0.0 : std::max(0.0, signed_area(clipped));
}

inline double overlap_area(const TraitPolygon& trait, const Rect2& r) { return overlap_area(trait.span(), r); }

inline Rect2 bounding_rect(const TraitPolygon& trait) { return trait.bounds(); }

// Unsigned distance from p to the polygon boundary.
inline double boundary_distance(Vec2 p, std::span<const Vec2> poly) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, detail::point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  }
  return best;
}

}  // namespace fiberuq
