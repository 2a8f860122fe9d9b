#pragma once

// Bivariate Gaussian KDE and its numerical interior-probability integral
// over a uniform node grid.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fiberuq/error.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/interior_probability.hpp"
#include "fiberuq/kernels.hpp"

namespace fiberuq {

// Symmetric 2x2 bandwidth matrix H; kernel is N(0, H).
struct BandwidthMatrix {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  double det() const { return xx * yy - xy * xy; }
};

// Scott's factor m^(-1/6) applied to the sample covariance (unbiased, m - 1),
// i.e. H = m^(-1/3) * Cov. A (near-)singular covariance falls back to a
// diagonal H with each degenerate axis floored.
inline BandwidthMatrix scott_bandwidth(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t m = xs.size();
  if (m < 2 || ys.size() != m) throw InvalidArgument("bivariate KDE needs >= 2 paired samples");
  const double mx = sample_mean(xs);
  const double my = sample_mean(ys);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double denom = static_cast<double>(m - 1);
  sxx /= denom;
  sxy /= denom;
  syy /= denom;
  const double factor2 = std::pow(static_cast<double>(m), -1.0 / 3.0);
  BandwidthMatrix h{factor2 * sxx, factor2 * sxy, factor2 * syy};
  const double scale = h.xx * h.yy;
  if (!(h.det() > 1e-12 * scale) || !(scale > 0.0)) {
    const double fx = scale_floor(mx);
    const double fy = scale_floor(my);
    h = BandwidthMatrix{std::max(factor2 * sxx, fx * fx), 0.0, std::max(factor2 * syy, fy * fy)};
  }
  return h;
}

class BivariateKde {
 public:
  BivariateKde(std::span<const double> xs, std::span<const double> ys)
      : xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()), h_(scott_bandwidth(xs, ys)) {
    const double det = h_.det();
    inv_xx_ = h_.yy / det;
    inv_xy_ = -h_.xy / det;
    inv_yy_ = h_.xx / det;
    norm_ = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det) * static_cast<double>(xs_.size()));
  }

  const BandwidthMatrix& bandwidth() const { return h_; }
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }

  double density(Vec2 p) const {
    double s = 0.0;
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      const double dx = p.x - xs_[k];
      const double dy = p.y - ys_[k];
      s += std::exp(-0.5 * (inv_xx_ * dx * dx + 2.0 * inv_xy_ * dx * dy + inv_yy_ * dy * dy));
    }
    return s * norm_;
  }

  // [min - 3 h_x, max + 3 h_x] x [min - 3 h_y, max + 3 h_y], h = sqrt(diag H).
  Rect2 padded_support() const {
    const auto [xlo, xhi] = std::minmax_element(xs_.begin(), xs_.end());
    const auto [ylo, yhi] = std::minmax_element(ys_.begin(), ys_.end());
    const double hx = std::sqrt(h_.xx);
    const double hy = std::sqrt(h_.yy);
    return {*xlo - 3.0 * hx, *xhi + 3.0 * hx, *ylo - 3.0 * hy, *yhi + 3.0 * hy};
  }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  BandwidthMatrix h_;
  double inv_xx_ = 0.0, inv_xy_ = 0.0, inv_yy_ = 0.0, norm_ = 0.0;
};

struct BkdeOptions {
  bool renormalize = false;
};

// Midpoint Riemann sum over an i x i grid of cells covering the padded
// support: density at each cell center, kept when the center passes the
// point-in-polygon test. Optionally divided by the total grid mass.
inline double interior_prob_bkde(const BivariateKde& kde, int resolution, const TraitPolygon& trait,
                                 BkdeOptions opts = {}) {
  if (resolution < 2) throw InvalidArgument("bkde integration resolution must be >= 2");
  const Rect2 box = kde.padded_support();
  if (!box.intersects(trait.bounds()) && !opts.renormalize) return 0.0;
  const double dx = box.width() / resolution;
  const double dy = box.height() / resolution;
  double inside = 0.0;
  double total = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double x = box.x0 + (i + 0.5) * dx;
    for (int j = 0; j < resolution; ++j) {
      const Vec2 node{x, box.y0 + (j + 0.5) * dy};
      const bool in = point_in_polygon(node, trait);
      if (!in && !opts.renormalize) continue;
      const double f = kde.density(node);
      total += f;
      if (in) inside += f;
    }
  }
  const double cell = dx * dy;
  double p = inside * cell;
  if (opts.renormalize && total > 0.0) p = inside / total;
  return std::clamp(p, 0.0, 1.0);
}

inline double interior_prob_bkde(std::span<const double> xs, std::span<const double> ys, int resolution,
                                 const TraitPolygon& trait, BkdeOptions opts = {}) {
  return interior_prob_bkde(BivariateKde(xs, ys), resolution, trait, opts);
}

}  // namespace fiberuq
