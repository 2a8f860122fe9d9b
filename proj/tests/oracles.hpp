#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's integration paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fiberuq/geometry.hpp"

namespace fiberuq::test {

// Plain even-odd crossing test without any boundary handling.
inline bool crossing_inside(const Polygon& poly, double x, double y) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > y) != (b.y > y)) {
      const double xc = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

// Area of poly cap rect by super-sampling the rect on an n x n grid.
inline double raster_overlap_area(const Polygon& poly, const Rect2& r, int n = 2048) {
  const double dx = r.width() / n;
  const double dy = r.height() / n;
  std::int64_t hits = 0;
  for (int j = 0; j < n; ++j) {
    const double y = r.y0 + (j + 0.5) * dy;
    for (int i = 0; i < n; ++i) {
      if (crossing_inside(poly, r.x0 + (i + 0.5) * dx, y)) ++hits;
    }
  }
  return static_cast<double>(hits) * dx * dy;
}

// Same pixel-center sampling as raster_overlap_area, but counts the centers
// between consecutive edge crossings of each row instead of testing each one.
inline double raster_overlap_area_scanline(const Polygon& poly, const Rect2& r, int n = 2048) {
  const double dx = r.width() / n;
  const double dy = r.height() / n;
  std::int64_t hits = 0;
  std::vector<double> xs;
  // centers x_i = r.x0 + (i + 0.5) dx; count of i in [0, n) with x_i < x
  const auto below = [&](double x) {
    const double t = std::ceil((x - r.x0) / dx - 0.5);
    return static_cast<std::int64_t>(std::clamp(t, 0.0, static_cast<double>(n)));
  };
  const std::size_t m = poly.size();
  for (int j = 0; j < n; ++j) {
    const double y = r.y0 + (j + 0.5) * dy;
    xs.clear();
    for (std::size_t i = 0, k = m - 1; i < m; k = i++) {
      const Vec2 a = poly[i], b = poly[k];
      if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // centers with xs[k] <= x < xs[k+1] are inside (crossing_inside counts x < xc)
      hits += below(xs[k + 1]) - below(xs[k]);
    }
  }
  return static_cast<double>(hits) * dx * dy;
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// Random simple polygon, star-shaped around center. Angles are jittered
// inside their slots so no angular gap reaches pi.
inline Polygon random_star_polygon(std::mt19937_64& rng, Vec2 center, double r_min, double r_max, int n) {
  const double slot = 2.0 * M_PI / n;
  std::uniform_real_distribution<double> jitter(0.0, 0.45 * slot);
  std::uniform_real_distribution<double> rad(r_min, r_max);
  Polygon p;
  for (int k = 0; k < n; ++k) {
    const double a = k * slot + jitter(rng);
    const double r = rad(rng);
    p.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return p;
}

// A fixed non-convex 7-gon used by several tests.
inline Polygon seven_gon() {
  return {{-1.2, -0.9}, {0.4, -1.3}, {1.5, -0.2}, {0.6, 0.1}, {1.1, 1.2}, {-0.3, 0.8}, {-1.4, 0.4}};
}

}  // namespace fiberuq::test
