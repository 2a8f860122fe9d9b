#pragma once

// Whole-grid interior probability: build each vertex's distribution from its
// ensemble members, cull vertices whose support misses the trait, and
// dispatch to the model's scalar integrator. Vertices are independent, so the
// work is spread over a fixed pool of threads and the output does not depend
// on the worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "fiberuq/bkde.hpp"
#include "fiberuq/distribution.hpp"
#include "fiberuq/field.hpp"
#include "fiberuq/interior_probability.hpp"
#include "fiberuq/monte_carlo.hpp"

namespace fiberuq {

struct VolumeOptions {
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  KdeEvaluation kde_evaluation = KdeEvaluation::kMixture;
};

struct VolumeStats {
  std::size_t culled = 0;
  double seconds = 0.0;
};

// Rectangle outside of which the distribution carries no (or < 1e-14) mass.
inline Rect2 support_rect(const VertexDistribution& dist) {
  struct Visitor {
    Rect2 operator()(const ParametricPair& p) const {
      return {p.x.support_lo(), p.x.support_hi(), p.y.support_lo(), p.y.support_hi()};
    }
    Rect2 operator()(const SamplePair& s) const {
      const KernelMixture mx{s.kernel, s.x, {}, kde_bandwidth(s.x)};
      const KernelMixture my{s.kernel, s.y, {}, kde_bandwidth(s.y)};
      return {mx.support_lo(), mx.support_hi(), my.support_lo(), my.support_hi()};
    }
    Rect2 operator()(const HistogramPair& h) const { return {h.x.lo(), h.x.hi(), h.y.lo(), h.y.hi()}; }
    Rect2 operator()(const Histogram2D& h) const {
      return {h.edges_x.front(), h.edges_x.back(), h.edges_y.front(), h.edges_y.back()};
    }
    Rect2 operator()(const BivariateSamples& b) const {
      const BandwidthMatrix h = scott_bandwidth(b.x, b.y);
      const double rx = kGaussianTruncation * std::sqrt(h.xx);
      const double ry = kGaussianTruncation * std::sqrt(h.yy);
      const auto [xlo, xhi] = std::minmax_element(b.x.begin(), b.x.end());
      const auto [ylo, yhi] = std::minmax_element(b.y.begin(), b.y.end());
      return {*xlo - rx, *xhi + rx, *ylo - ry, *yhi + ry};
    }
  };
  return std::visit(Visitor{}, dist);
}

// Closed-form / numerical integration of one distribution (no Monte Carlo).
inline double interior_probability(const VertexDistribution& dist, const NoiseModelConfig& cfg,
                                   const TraitPolygon& trait, KdeEvaluation kde_evaluation = KdeEvaluation::kMixture) {
  struct Visitor {
    const NoiseModelConfig& cfg;
    const TraitPolygon& trait;
    KdeEvaluation kde_evaluation;
    double operator()(const ParametricPair& p) const { return interior_prob_parametric(p.x, p.y, trait); }
    double operator()(const SamplePair& s) const {
      return interior_prob_kde_independent(s.x, s.y, s.kernel, trait, KdeOptions{kde_evaluation, true});
    }
    double operator()(const HistogramPair& h) const { return interior_prob_hist_independent(h.x, h.y, trait); }
    double operator()(const Histogram2D& h) const { return interior_prob_hist2d(h, trait); }
    double operator()(const BivariateSamples& b) const {
      return interior_prob_bkde(b.x, b.y, cfg.integration_resolution, trait, BkdeOptions{cfg.renormalize});
    }
  };
  return std::visit(Visitor{cfg, trait, kde_evaluation}, dist);
}

// Probability for one vertex given its member samples. `stream` seeds the
// Monte Carlo draws (the vertex linear index in volume computations).
inline double vertex_probability(const NoiseModelConfig& cfg, std::span<const double> xs, std::span<const double> ys,
                                 const TraitPolygon& trait, std::uint64_t stream, bool* culled = nullptr,
                                 KdeEvaluation kde_evaluation = KdeEvaluation::kMixture) {
  const VertexDistribution dist = make_distribution(cfg, xs, ys);
  const bool miss = !support_rect(dist).intersects(trait.bounds());
  if (culled) *culled = miss;
  if (miss) return 0.0;
  if (cfg.kind == ModelKind::kMonteCarlo) {
    return interior_prob_monte_carlo(dist, trait, cfg.sample_count, *cfg.seed, stream);
  }
  return interior_probability(dist, cfg, trait, kde_evaluation);
}

// Runs body(index) for index in [0, count) on `threads` workers. Work is
// handed out in fixed blocks; the first failure (lowest index) is rethrown.
template <class Body>
void parallel_for_index(std::size_t count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kBlock = 64;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(kBlock);
      if (begin >= count) return;
      const std::size_t end = std::min(count, begin + kBlock);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          return;
        }
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

// Raised when a vertex's model fails; the message names the vertex.
struct VertexError : Error {
  using Error::Error;
};

inline ProbabilityVolume compute_probability_volume(const EnsembleField& ens, const NoiseModelConfig& cfg,
                                                    const TraitPolygon& trait, const VolumeOptions& opts = {},
                                                    VolumeStats* stats = nullptr) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = ens.vertex_count();
  const int m = ens.member_count();
  std::vector<double> out(n, 0.0);
  std::vector<unsigned char> culled(n, 0);

  parallel_for_index(n, opts.threads, [&](std::size_t v) {
    std::vector<double> xs(m), ys(m);
    ens.gather(v, 0, xs);
    ens.gather(v, 1, ys);
    bool miss = false;
    try {
      out[v] = vertex_probability(cfg, xs, ys, trait, v, &miss, opts.kde_evaluation);
    } catch (const std::exception& e) {
      throw VertexError(describe_vertex(ens.grid(), v) + ": " + e.what());
    }
    culled[v] = miss ? 1 : 0;
  });

  if (stats) {
    stats->culled = static_cast<std::size_t>(std::count(culled.begin(), culled.end(), 1));
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return ProbabilityVolume(ens.grid(), std::move(out));
}

}  // namespace fiberuq
