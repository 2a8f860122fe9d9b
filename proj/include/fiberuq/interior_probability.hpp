#pragma once

// Closed-form interior probabilities Pr((X, Y) in T) for independent
// marginals over arbitrary simple polygons.
//
// Green's theorem turns the area integral of pdf_X(x) pdf_Y(y) over the
// (clipped) trait into a sum of edge integrals of L dx + M dy with
//   L = -1/2 pdf_X(x) F_Y(y),   M = 1/2 F_X(x) pdf_Y(y),
// F being the kernel antiderivative. Along a straight edge both x and y are
// linear in the edge parameter t, so for the compact kernels the integrand is
// a polynomial of degree <= 5 between support breakpoints and a 4-point
// Gauss-Legendre rule integrates it exactly. Gaussian edges parallel to an
// axis reduce to CDF differences; oblique ones use adaptive Gauss-Legendre.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fiberuq/distribution.hpp"
#include "fiberuq/error.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/kernels.hpp"

namespace fiberuq {

inline constexpr double kEdgeQuadratureTolerance = 1e-10;
inline constexpr double kProbabilitySlack = 1e-9;

namespace detail {

inline constexpr std::array<double, 2> kGl4Nodes{0.3399810435848562648, 0.8611363115940525752};
inline constexpr std::array<double, 2> kGl4Weights{0.6521451548625461426, 0.3478548451374538574};
inline constexpr std::array<double, 4> kGl8Nodes{0.1834346424956498049, 0.5255324099163289858,
                                                 0.7966664774136267396, 0.9602898564975362317};
inline constexpr std::array<double, 4> kGl8Weights{0.3626837833783619830, 0.3137066458778872873,
                                                   0.2223810344533744706, 0.1012285362903762592};

template <std::size_t N, class F>
double gauss_legendre(const std::array<double, N>& nodes, const std::array<double, N>& weights, F&& f, double a,
                      double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    s += weights[k] * (f(mid - half * nodes[k]) + f(mid + half * nodes[k]));
  }
  return s * half;
}

template <class F>
double adaptive_gl(F& f, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss_legendre(kGl8Nodes, kGl8Weights, f, a, m);
  const double right = gauss_legendre(kGl8Nodes, kGl8Weights, f, m, b);
  const double sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= tol) return sum;
  return adaptive_gl(f, a, m, left, 0.5 * tol, depth - 1) + adaptive_gl(f, m, b, right, 0.5 * tol, depth - 1);
}

// Adaptive 8-point Gauss-Legendre on [a, b] to absolute tolerance tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol) {
  const double whole = gauss_legendre(kGl8Nodes, kGl8Weights, f, a, b);
  return adaptive_gl(f, a, b, whole, tol, 40);
}

template <class M>
constexpr bool marginal_is_compact(const M& m) {
  return is_compact(m.kind);
}

template <class M>
double marginal_bandwidth(const M& m) {
  return m.bandwidth;
}

template <class M>
std::pair<double, double> pdf_cdf(const M& m, double x) {
  if constexpr (requires { m.pdf_cdf(x); }) {
    return m.pdf_cdf(x);
  } else {
    return {m.pdf(x), m.cdf(x)};
  }
}

}  // namespace detail

// Line integral of L dx + M dy along the oriented segment a -> b for
// independent marginals mx, my (ScaledKernel or KernelMixture).
template <class MX, class MY>
double edge_integral_independent(Vec2 a, Vec2 b, const MX& mx, const MY& my) {
  const Vec2 d = b - a;
  if (d.x == 0.0 && d.y == 0.0) return 0.0;

  auto integrand = [&](double t) {
    const auto [fx, cx] = detail::pdf_cdf(mx, a.x + t * d.x);
    const auto [fy, cy] = detail::pdf_cdf(my, a.y + t * d.y);
    return -0.5 * fx * cy * d.x + 0.5 * cx * fy * d.y;
  };

  std::vector<double> cuts{0.0, 1.0};
  auto add_x = [&](double bx) {
    if (d.x == 0.0) return;
    const double t = (bx - a.x) / d.x;
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  };
  auto add_y = [&](double by) {
    if (d.y == 0.0) return;
    const double t = (by - a.y) / d.y;
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  };
  mx.breakpoints(add_x);
  my.breakpoints(add_y);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  if (detail::marginal_is_compact(mx) && detail::marginal_is_compact(my)) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      s += detail::gauss_legendre(detail::kGl4Nodes, detail::kGl4Weights, integrand, cuts[k], cuts[k + 1]);
    }
    return s;
  }

  if (d.y == 0.0) return -0.5 * my.cdf(a.y) * (mx.cdf(b.x) - mx.cdf(a.x));
  if (d.x == 0.0) return 0.5 * mx.cdf(a.x) * (my.cdf(b.y) - my.cdf(a.y));

  // Pre-split so that no piece spans more than two bandwidths on either axis;
  // a single 8-point rule could otherwise straddle a narrow bump entirely.
  const double span_x = std::abs(d.x) / detail::marginal_bandwidth(mx);
  const double span_y = std::abs(d.y) / detail::marginal_bandwidth(my);
  const int pieces = std::max(1, static_cast<int>(std::ceil(0.5 * std::max(span_x, span_y))));
  std::vector<double> grid;
  grid.reserve(cuts.size() + pieces);
  for (int k = 0; k <= pieces; ++k) grid.push_back(static_cast<double>(k) / pieces);
  grid.insert(grid.end(), cuts.begin(), cuts.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const double tol = kEdgeQuadratureTolerance / static_cast<double>(grid.size() - 1);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) s += detail::integrate_adaptive(integrand, grid[k], grid[k + 1], tol);
  return s;
}

// Sum of edge integrals over a closed CCW ring.
template <class MX, class MY>
double polygon_integral_independent(std::span<const Vec2> ring, const MX& mx, const MY& my) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) s += edge_integral_independent(ring[i], ring[(i + 1) % n], mx, my);
  return s;
}

// Clamps a raw probability into [0, 1]; anything further out than the slack
// indicates a bug, not rounding.
inline double checked_probability(double raw) {
  if (!std::isfinite(raw) || raw < -kProbabilitySlack || raw > 1.0 + kProbabilitySlack) {
    throw ConsistencyError("interior probability " + std::to_string(raw) + " outside [0, 1]");
  }
  return std::clamp(raw, 0.0, 1.0);
}

// Eq.-1 style product of CDF differences over a rectangle.
template <class MX, class MY>
double interior_prob_rect(const MX& px, const MY& py, const Rect2& r) {
  return std::clamp((px.cdf(r.x1) - px.cdf(r.x0)) * (py.cdf(r.y1) - py.cdf(r.y0)), 0.0, 1.0);
}

namespace detail {

// Affine map into a frame where both marginals have unit bandwidth. Clipping
// there keeps the degenerate-area threshold meaningful for near-delta kernels.
struct StandardFrame {
  double ox, oy, sx, sy;
  Vec2 to(Vec2 p) const { return {(p.x - ox) / sx, (p.y - oy) / sy}; }
};

inline Polygon transform(std::span<const Vec2> poly, const StandardFrame& f) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) out.push_back(f.to(p));
  return out;
}

inline KernelMixture standardize(const KernelMixture& m, double origin) {
  KernelMixture s{m.kind, {}, m.weights, 1.0};
  s.centers.reserve(m.centers.size());
  for (double c : m.centers) s.centers.push_back((c - origin) / m.bandwidth);
  return s;
}

// Gaussian components further than this (in bandwidths) from x are skipped:
// their pdf is below 1e-18 and their CDF is 0 or 1 to double precision.
inline constexpr double kGaussianReach = 9.0;

// A KernelMixture with centers sorted once, so pdf/cdf only visit the
// components within reach of x. Components left of the window add their full
// weight to the CDF through a prefix sum.
class WindowedMixture {
 public:
  KernelKind kind;
  double bandwidth;

  explicit WindowedMixture(const KernelMixture& m)
      : kind(m.kind), bandwidth(m.bandwidth), reach_((is_compact(m.kind) ? 1.0 : kGaussianReach) * m.bandwidth) {
    std::vector<std::size_t> order(m.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return m.centers[a] < m.centers[b]; });
    centers_.reserve(order.size());
    weights_.reserve(order.size());
    below_.reserve(order.size() + 1);
    below_.push_back(0.0);
    for (std::size_t i : order) {
      centers_.push_back(m.centers[i]);
      weights_.push_back(m.weight(i));
      below_.push_back(below_.back() + m.weight(i));
    }
  }

  double pdf(double x) const {
    const auto [lo, hi] = window(x);
    const double inv_h = 1.0 / bandwidth;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += weights_[i] * unit_pdf(kind, (x - centers_[i]) * inv_h);
    return s * inv_h;
  }

  double cdf(double x) const {
    const auto [lo, hi] = window(x);
    const double inv_h = 1.0 / bandwidth;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += weights_[i] * unit_cdf(kind, (x - centers_[i]) * inv_h);
    return below_[lo] + s;
  }

  // Both in one pass over the window.
  std::pair<double, double> pdf_cdf(double x) const {
    const auto [lo, hi] = window(x);
    const double inv_h = 1.0 / bandwidth;
    double f = 0.0, c = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double u = (x - centers_[i]) * inv_h;
      f += weights_[i] * unit_pdf(kind, u);
      c += weights_[i] * unit_cdf(kind, u);
    }
    return {f * inv_h, below_[lo] + c};
  }

  template <class Out>
  void breakpoints(Out&& out) const {
    if (!is_compact(kind)) return;
    for (double c : centers_) {
      out(c - bandwidth);
      out(c + bandwidth);
    }
  }

 private:
  std::pair<std::size_t, std::size_t> window(double x) const {
    const auto lo = std::lower_bound(centers_.begin(), centers_.end(), x - reach_);
    const auto hi = std::upper_bound(lo, centers_.end(), x + reach_);
    return {static_cast<std::size_t>(lo - centers_.begin()), static_cast<std::size_t>(hi - centers_.begin())};
  }

  double reach_;
  std::vector<double> centers_, weights_, below_;
};

}  // namespace detail

// Green's-theorem interior probability for one pair of independent scaled
// kernels. The trait is clipped to the kernels' joint support (+-8 bandwidths
// for Gaussians) before integration.
inline double interior_prob_parametric(const ScaledKernel& px, const ScaledKernel& py, const TraitPolygon& trait) {
  const Rect2 support{px.support_lo(), px.support_hi(), py.support_lo(), py.support_hi()};
  if (!support.intersects(trait.bounds())) return 0.0;
  const detail::StandardFrame frame{px.center, py.center, px.bandwidth, py.bandwidth};
  const ScaledKernel ux{px.kind, 0.0, 1.0};
  const ScaledKernel uy{py.kind, 0.0, 1.0};
  const double r = support_radius(px.kind);
  const double ry = support_radius(py.kind);
  const Polygon clipped = clip_to_rect(detail::transform(trait.span(), frame), Rect2{-r, r, -ry, ry});
  if (clipped.empty()) return 0.0;
  return checked_probability(polygon_integral_independent(clipped, ux, uy));
}

// Same integral for weighted kernel mixtures (independent KDE marginals or
// histograms written as kernels). Summation over kernel pairs is folded into
// the mixture densities, which is the pairwise double sum with its order
// rearranged.
inline double interior_prob_mixture(const KernelMixture& mx, const KernelMixture& my, const TraitPolygon& trait) {
  if (mx.centers.empty() || my.centers.empty()) throw InvalidArgument("interior_prob_mixture: empty mixture");
  const Rect2 support{mx.support_lo(), mx.support_hi(), my.support_lo(), my.support_hi()};
  if (!support.intersects(trait.bounds())) return 0.0;
  const double ox = mx.centers.front();
  const double oy = my.centers.front();
  const detail::StandardFrame frame{ox, oy, mx.bandwidth, my.bandwidth};
  const KernelMixture ux = detail::standardize(mx, ox);
  const KernelMixture uy = detail::standardize(my, oy);
  const Rect2 unit_support{ux.support_lo(), ux.support_hi(), uy.support_lo(), uy.support_hi()};
  const Polygon clipped = clip_to_rect(detail::transform(trait.span(), frame), unit_support);
  if (clipped.empty()) return 0.0;
  return checked_probability(
      polygon_integral_independent(clipped, detail::WindowedMixture(ux), detail::WindowedMixture(uy)));
}

enum class KdeEvaluation {
  kPairwise,  // (1/m^2) sum_i sum_j over kernel pairs
  kMixture,   // one Green's integral of the mixture marginals
};

struct KdeOptions {
  KdeEvaluation evaluation = KdeEvaluation::kPairwise;
  bool cull_pairs = true;
};

// Independent KDE model: Silverman bandwidths per variable (floored for
// degenerate sets), then the double sum over kernel pairs.
inline double interior_prob_kde_independent(std::span<const double> xs, std::span<const double> ys, KernelKind kind,
                                            const TraitPolygon& trait, KdeOptions opts = {}) {
  if (xs.empty() || ys.empty()) throw InvalidArgument("interior_prob_kde_independent: empty sample set");
  const KernelMixture mx = make_kde(xs, kind);
  const KernelMixture my = make_kde(ys, kind);
  if (opts.evaluation == KdeEvaluation::kMixture) return interior_prob_mixture(mx, my, trait);

  const Rect2& bounds = trait.bounds();
  const double rx = support_radius(kind) * mx.bandwidth;
  const double ry = support_radius(kind) * my.bandwidth;
  double sum = 0.0;
  for (double x : xs) {
    const ScaledKernel kx{kind, x, mx.bandwidth};
    if (opts.cull_pairs && (x + rx < bounds.x0 || x - rx > bounds.x1)) continue;
    for (double y : ys) {
      if (opts.cull_pairs && !Rect2{x - rx, x + rx, y - ry, y + ry}.intersects(bounds)) continue;
      sum += interior_prob_parametric(kx, ScaledKernel{kind, y, my.bandwidth}, trait);
    }
  }
  return checked_probability(sum / (static_cast<double>(xs.size()) * static_cast<double>(ys.size())));
}

namespace detail {

// Fraction of rect r covered by the trait, computed in r's unit-square frame.
inline double covered_fraction(const TraitPolygon& trait, const Rect2& r) {
  if (!r.intersects(trait.bounds())) return 0.0;
  const StandardFrame frame{r.x0, r.y0, r.width(), r.height()};
  const Polygon clipped = clip_to_rect(transform(trait.span(), frame), Rect2{0.0, 1.0, 0.0, 1.0});
  if (clipped.empty()) return 0.0;
  return std::clamp(signed_area(clipped), 0.0, 1.0);
}

}  // namespace detail

// Independent histograms: sum_i sum_j wX_i wY_j |T cap bin_ij| / |bin_ij|.
inline double interior_prob_hist_independent(const Histogram1D& hx, const Histogram1D& hy, const TraitPolygon& trait) {
  double sum = 0.0;
  for (std::size_t i = 0; i < hx.bins(); ++i) {
    for (std::size_t j = 0; j < hy.bins(); ++j) {
      const Rect2 bin{hx.edges[i], hx.edges[i + 1], hy.edges[j], hy.edges[j + 1]};
      sum += hx.weights[i] * hy.weights[j] * detail::covered_fraction(trait, bin);
    }
  }
  return checked_probability(sum);
}

// Correlated 2D histogram: sum_b w_b |T cap bin_b| / |bin_b|.
inline double interior_prob_hist2d(const Histogram2D& h, const TraitPolygon& trait) {
  double sum = 0.0;
  for (std::size_t i = 0; i < h.bins_x(); ++i) {
    for (std::size_t j = 0; j < h.bins_y(); ++j) {
      const double w = h.weight(i, j);
      if (w == 0.0) continue;
      sum += w * detail::covered_fraction(trait, h.bin_rect(i, j));
    }
  }
  return checked_probability(sum);
}

}  // namespace fiberuq
