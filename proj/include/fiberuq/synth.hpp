#pragma once

// Synthetic experiment inputs: sphere/tangle ground truth, bimodal noise
// ensembles, hixel block reduction, ground-truth indicator volumes and the
// interior-probability error metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fiberuq/error.hpp"
#include "fiberuq/field.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/monte_carlo.hpp"
#include "fiberuq/volume.hpp"

namespace fiberuq {

inline double sphere(double x, double y, double z) { return x * x + y * y + z * z; }

inline double tangle(double x, double y, double z) {
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  return x2 * x2 - 5.0 * x2 + y2 * y2 - 5.0 * y2 + z2 * z2 - 5.0 * z2 + 11.8;
}

inline constexpr double kTangleDomain = 2.5;

// Gaussian component in attribute space: mean offset from the ground truth
// and covariance.
struct Gaussian2 {
  Vec2 offset;
  double cxx = 1.0;
  double cxy = 0.0;
  double cyy = 1.0;
};

struct BimodalNoiseSpec {
  double main_weight = 0.8;
  Gaussian2 main;
  Gaussian2 outlier;
  bool correlated = false;

  void validate() const {
    if (!(main_weight > 0.0 && main_weight < 1.0)) throw InvalidArgument("main_weight must be in (0, 1)");
    for (const Gaussian2* g : {&main, &outlier}) {
      if (g->cxx < 0.0 || g->cyy < 0.0 || g->cxx * g->cyy - g->cxy * g->cxy < 0.0) {
        throw InvalidArgument("bimodal covariance must be positive semi-definite");
      }
      if (!correlated && g->cxy != 0.0) throw InvalidArgument("off-diagonal covariance requires correlated = true");
    }
  }
};

// Main mode at the ground truth and an outlier mode shifted by +25% of each
// variable's range, both with sigma = 4% of the range, weights 0.8 / 0.2.
inline BimodalNoiseSpec default_bimodal_spec(double range_x, double range_y) {
  const double sx = 0.04 * range_x, sy = 0.04 * range_y;
  BimodalNoiseSpec s;
  s.main_weight = 0.8;
  s.main = Gaussian2{{0.0, 0.0}, sx * sx, 0.0, sy * sy};
  s.outlier = Gaussian2{{0.25 * range_x, 0.25 * range_y}, sx * sx, 0.0, sy * sy};
  return s;
}

// Noise draw from the bimodal spec. Correlated specs pick one mode per draw
// and sample it jointly; uncorrelated specs pick a mode per variable.
inline Vec2 sample_bimodal(const BimodalNoiseSpec& spec, Rng& rng) {
  std::bernoulli_distribution pick_main(spec.main_weight);
  std::normal_distribution<double> n(0.0, 1.0);
  if (spec.correlated) {
    const Gaussian2& g = pick_main(rng) ? spec.main : spec.outlier;
    const double l11 = std::sqrt(g.cxx);
    const double l21 = l11 > 0.0 ? g.cxy / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, g.cyy - l21 * l21));
    const double z1 = n(rng);
    const double z2 = n(rng);
    return {g.offset.x + l11 * z1, g.offset.y + l21 * z1 + l22 * z2};
  }
  const Gaussian2& gx = pick_main(rng) ? spec.main : spec.outlier;
  const double x = gx.offset.x + std::sqrt(gx.cxx) * n(rng);
  const Gaussian2& gy = pick_main(rng) ? spec.main : spec.outlier;
  const double y = gy.offset.y + std::sqrt(gy.cyy) * n(rng);
  return {x, y};
}

// Grid res^3 over [-2.5, 2.5]^3.
inline UniformGrid3 tangle_grid(int res) {
  if (res < 2) throw InvalidArgument("resolution must be >= 2");
  const double h = 2.0 * kTangleDomain / (res - 1);
  return UniformGrid3{{res, res, res}, {-kTangleDomain, -kTangleDomain, -kTangleDomain}, {h, h, h}};
}

// a1 = sphere, a2 = tangle.
inline BivariateField tangle_sphere_ground_truth(int res) {
  BivariateField f{tangle_grid(res), {}, {}};
  const std::size_t n = f.grid.vertex_count();
  f.a1.resize(n);
  f.a2.resize(n);
  for (int k = 0; k < res; ++k) {
    for (int j = 0; j < res; ++j) {
      for (int i = 0; i < res; ++i) {
        const auto p = f.grid.position(i, j, k);
        const std::size_t v = f.grid.index(i, j, k);
        f.a1[v] = sphere(p[0], p[1], p[2]);
        f.a2[v] = tangle(p[0], p[1], p[2]);
      }
    }
  }
  return f;
}

inline std::array<double, 2> attribute_ranges(const BivariateField& f) {
  const auto [x0, x1] = std::minmax_element(f.a1.begin(), f.a1.end());
  const auto [y0, y1] = std::minmax_element(f.a2.begin(), f.a2.end());
  return {*x1 - *x0, *y1 - *y0};
}

// Adds `members` independent bimodal draws to the ground truth at every
// vertex. Each vertex uses its own stream so the result is reproducible
// regardless of threading.
inline EnsembleField make_noisy_ensemble(const BivariateField& truth, int members, const BimodalNoiseSpec& spec,
                                         std::uint64_t seed, std::array<std::string, 2> names = {"a1", "a2"},
                                         unsigned threads = 1) {
  spec.validate();
  if (members < 1) throw InvalidArgument("members must be >= 1");
  const std::size_t n = truth.grid.vertex_count();
  std::vector<float> values(2 * n * members);
  parallel_for_index(n, threads, [&](std::size_t v) {
    Rng rng = make_stream(seed, v);
    for (int m = 0; m < members; ++m) {
      const Vec2 e = sample_bimodal(spec, rng);
      values[static_cast<std::size_t>(m) * n + v] = static_cast<float>(truth.a1[v] + e.x);
      values[(static_cast<std::size_t>(members) + m) * n + v] = static_cast<float>(truth.a2[v] + e.y);
    }
  });
  return EnsembleField(truth.grid, members, std::move(names), std::move(values));
}

inline EnsembleField gen_tangle_sphere_ensemble(int res, int members, const BimodalNoiseSpec& spec,
                                                std::uint64_t seed, unsigned threads = 1) {
  return make_noisy_ensemble(tangle_sphere_ground_truth(res), members, spec, seed, {"sphere", "tangle"}, threads);
}

// Splits the grid into block^3 bricks; each brick becomes one vertex whose
// block^3 original values are its members. Grids not divisible by block are
// padded by clamping indices to the last vertex.
inline EnsembleField hixel_reduce(const BivariateField& field, int block = 2) {
  if (block < 1) throw InvalidArgument("hixel block must be >= 1");
  const UniformGrid3& g = field.grid;
  UniformGrid3 out;
  for (int a = 0; a < 3; ++a) {
    out.dims[a] = (g.dims[a] + block - 1) / block;
    out.spacing[a] = g.spacing[a] * block;
    out.origin[a] = g.origin[a] + 0.5 * (block - 1) * g.spacing[a];
  }
  const int members = block * block * block;
  const std::size_t n = out.vertex_count();
  std::vector<float> values(2 * n * members);
  for (int k = 0; k < out.dims[2]; ++k) {
    for (int j = 0; j < out.dims[1]; ++j) {
      for (int i = 0; i < out.dims[0]; ++i) {
        const std::size_t v = out.index(i, j, k);
        int m = 0;
        for (int dz = 0; dz < block; ++dz) {
          for (int dy = 0; dy < block; ++dy) {
            for (int dx = 0; dx < block; ++dx, ++m) {
              const int si = std::min(i * block + dx, g.dims[0] - 1);
              const int sj = std::min(j * block + dy, g.dims[1] - 1);
              const int sk = std::min(k * block + dz, g.dims[2] - 1);
              const std::size_t src = g.index(si, sj, sk);
              values[static_cast<std::size_t>(m) * n + v] = static_cast<float>(field.a1[src]);
              values[(static_cast<std::size_t>(members) + m) * n + v] = static_cast<float>(field.a2[src]);
            }
          }
        }
      }
    }
  }
  return EnsembleField(out, members, {"a1", "a2"}, std::move(values));
}

// 1 where the vertex's attribute pair lies in the trait, else 0.
inline ProbabilityVolume ground_truth_interior_volume(const BivariateField& field, const TraitPolygon& trait) {
  std::vector<double> values(field.a1.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    values[v] = point_in_polygon({field.a1[v], field.a2[v]}, trait) ? 1.0 : 0.0;
  }
  return ProbabilityVolume(field.grid, std::move(values));
}

// Uncertainty-blind baseline: indicator of the per-vertex ensemble mean.
inline ProbabilityVolume mean_field_indicator(const EnsembleField& ens, const TraitPolygon& trait) {
  return ground_truth_interior_volume(mean_field(ens), trait);
}

// Euclidean 2-norm of the per-vertex difference.
inline double interior_probability_error(const ProbabilityVolume& a, const ProbabilityVolume& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("probability volumes are defined on different grids");
  double ss = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    const double d = a[v] - b[v];
    ss += d * d;
  }
  return std::sqrt(ss);
}

}  // namespace fiberuq
