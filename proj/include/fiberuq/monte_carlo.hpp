#pragma once

// Monte Carlo interior probability S / R: draw R samples from a vertex
// distribution and count those inside the trait.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "fiberuq/bkde.hpp"
#include "fiberuq/distribution.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/kernels.hpp"

namespace fiberuq {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (global seed, stream index), e.g. one per vertex,
// so results do not depend on how work is scheduled.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double sample_unit_kernel(KernelKind kind, Rng& rng) {
  switch (kind) {
    case KernelKind::kUniform: return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    case KernelKind::kEpanechnikov: {
      // Devroye: of three U(-1,1) draws, take u2 if |u3| is the largest, else u3.
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
      if (std::abs(u3) >= std::abs(u2) && std::abs(u3) >= std::abs(u1)) return u2;
      return u3;
    }
    case KernelKind::kGaussian: return std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  return 0.0;
}

// Precomputed draw state for one vertex distribution.
class DistributionSampler {
 public:
  explicit DistributionSampler(const VertexDistribution& dist) : dist_(&dist) {
    std::visit([this](const auto& d) { prepare(d); }, dist);
  }

  Vec2 operator()(Rng& rng) {
    return std::visit([&](const auto& d) { return draw(d, rng); }, *dist_);
  }

 private:
  void prepare(const ParametricPair&) {}
  void prepare(const SamplePair& d) {
    hx_ = kde_bandwidth(d.x);
    hy_ = kde_bandwidth(d.y);
  }
  void prepare(const HistogramPair& d) {
    pick_x_ = std::discrete_distribution<std::size_t>(d.x.weights.begin(), d.x.weights.end());
    pick_y_ = std::discrete_distribution<std::size_t>(d.y.weights.begin(), d.y.weights.end());
  }
  void prepare(const Histogram2D& d) {
    pick_x_ = std::discrete_distribution<std::size_t>(d.weights.begin(), d.weights.end());
  }
  void prepare(const BivariateSamples& d) {
    const BandwidthMatrix h = scott_bandwidth(d.x, d.y);
    // Cholesky factor of H.
    l11_ = std::sqrt(h.xx);
    l21_ = h.xy / l11_;
    l22_ = std::sqrt(std::max(0.0, h.yy - l21_ * l21_));
  }

  static Vec2 draw(const ParametricPair& d, Rng& rng) {
    const double x = d.x.center + d.x.bandwidth * sample_unit_kernel(d.x.kind, rng);
    const double y = d.y.center + d.y.bandwidth * sample_unit_kernel(d.y.kind, rng);
    return {x, y};
  }
  Vec2 draw(const SamplePair& d, Rng& rng) const {
    std::uniform_int_distribution<std::size_t> ix(0, d.x.size() - 1);
    std::uniform_int_distribution<std::size_t> iy(0, d.y.size() - 1);
    const double x = d.x[ix(rng)] + hx_ * sample_unit_kernel(d.kernel, rng);
    const double y = d.y[iy(rng)] + hy_ * sample_unit_kernel(d.kernel, rng);
    return {x, y};
  }
  Vec2 draw(const HistogramPair& d, Rng& rng) {
    const std::size_t i = pick_x_(rng);
    const double x = d.x.edges[i] + uniform01(rng) * (d.x.edges[i + 1] - d.x.edges[i]);
    const std::size_t j = pick_y_(rng);
    const double y = d.y.edges[j] + uniform01(rng) * (d.y.edges[j + 1] - d.y.edges[j]);
    return {x, y};
  }
  Vec2 draw(const Histogram2D& d, Rng& rng) {
    const std::size_t b = pick_x_(rng);
    const Rect2 r = d.bin_rect(b / d.bins_y(), b % d.bins_y());
    const double x = r.x0 + uniform01(rng) * r.width();
    const double y = r.y0 + uniform01(rng) * r.height();
    return {x, y};
  }
  Vec2 draw(const BivariateSamples& d, Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, d.x.size() - 1);
    const std::size_t k = pick(rng);
    std::normal_distribution<double> n(0.0, 1.0);
    const double z1 = n(rng);
    const double z2 = n(rng);
    return {d.x[k] + l11_ * z1, d.y[k] + l21_ * z1 + l22_ * z2};
  }

  const VertexDistribution* dist_;
  double hx_ = 0.0, hy_ = 0.0;
  std::discrete_distribution<std::size_t> pick_x_;
  std::discrete_distribution<std::size_t> pick_y_;
  double l11_ = 0.0, l21_ = 0.0, l22_ = 0.0;
};

// Pr = S / R for R draws from `dist` using the stream (seed, stream).
inline double interior_prob_monte_carlo(const VertexDistribution& dist, const TraitPolygon& trait,
                                        std::int64_t draws, std::uint64_t seed, std::uint64_t stream = 0) {
  if (draws < 1) throw InvalidArgument("monte carlo needs at least one draw");
  DistributionSampler sampler(dist);
  Rng rng = make_stream(seed, stream);
  std::int64_t hits = 0;
  for (std::int64_t k = 0; k < draws; ++k) {
    if (point_in_polygon(sampler(rng), trait)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace fiberuq
