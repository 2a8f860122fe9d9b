#pragma once

// Per-vertex noise models: the configuration selecting one, and the
// distribution representations built from a vertex's ensemble samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fiberuq/error.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/kernels.hpp"

namespace fiberuq {

enum class ModelKind { kParametric, kKde, kHistogram, kHistogram2D, kBivariateKde, kMonteCarlo };

struct NoiseModelConfig {
  ModelKind kind = ModelKind::kParametric;
  KernelKind kernel = KernelKind::kGaussian;
  int bins = 0;                    // histogram kinds
  int integration_resolution = 0;  // bivariate KDE
  bool renormalize = false;        // bivariate KDE: divide by the grid's total mass
  std::int64_t sample_count = 0;   // monte-carlo
  std::optional<std::uint64_t> seed;
  // Monte Carlo draws from this model (never monte-carlo itself).
  ModelKind base_kind = ModelKind::kParametric;

  // Throws InvalidArgument when a field required by the kind is missing.
  void validate() const {
    auto check_base = [](ModelKind k) {
      if (k == ModelKind::kMonteCarlo) throw InvalidArgument("monte-carlo base model cannot be monte-carlo");
    };
    auto check_bins = [this] {
      if (bins < 1) throw InvalidArgument("histogram models need bins >= 1");
    };
    auto check_resolution = [this] {
      if (integration_resolution < 2) throw InvalidArgument("bkde needs integration resolution >= 2");
    };
    auto check_kind = [&](ModelKind k) {
      if (k == ModelKind::kHistogram || k == ModelKind::kHistogram2D) check_bins();
      if (k == ModelKind::kBivariateKde) check_resolution();
    };
    if (kind == ModelKind::kMonteCarlo) {
      check_base(base_kind);
      if (sample_count < 1) throw InvalidArgument("monte-carlo needs sample count >= 1");
      if (!seed) throw InvalidArgument("monte-carlo needs an explicit seed");
      // bivariate KDE sampling needs no integration grid
      if (base_kind == ModelKind::kHistogram || base_kind == ModelKind::kHistogram2D) check_bins();
    } else {
      check_kind(kind);
    }
  }

  // The model whose distribution is built per vertex.
  ModelKind distribution_kind() const { return kind == ModelKind::kMonteCarlo ? base_kind : kind; }
};

// Names shared by the CLI and the HTTP service:
//   parametric-{uniform,epanechnikov,gaussian}, kde-{...}, histogram, histogram2d, bkde, monte-carlo
inline std::optional<NoiseModelConfig> parse_model_name(std::string_view name) {
  NoiseModelConfig cfg;
  auto with_kernel = [&](std::string_view prefix, ModelKind kind) -> std::optional<NoiseModelConfig> {
    if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
    const auto kernel = parse_kernel(name.substr(prefix.size()));
    if (!kernel) return std::nullopt;
    cfg.kind = kind;
    cfg.kernel = *kernel;
    return cfg;
  };
  if (auto c = with_kernel("parametric-", ModelKind::kParametric)) return c;
  if (auto c = with_kernel("kde-", ModelKind::kKde)) return c;
  if (name == "histogram") {
    cfg.kind = ModelKind::kHistogram;
    return cfg;
  }
  if (name == "histogram2d") {
    cfg.kind = ModelKind::kHistogram2D;
    return cfg;
  }
  if (name == "bkde") {
    cfg.kind = ModelKind::kBivariateKde;
    return cfg;
  }
  if (name == "monte-carlo") {
    cfg.kind = ModelKind::kMonteCarlo;
    return cfg;
  }
  return std::nullopt;
}

inline std::string model_name(ModelKind kind, KernelKind kernel) {
  switch (kind) {
    case ModelKind::kParametric: return "parametric-" + std::string(to_string(kernel));
    case ModelKind::kKde: return "kde-" + std::string(to_string(kernel));
    case ModelKind::kHistogram: return "histogram";
    case ModelKind::kHistogram2D: return "histogram2d";
    case ModelKind::kBivariateKde: return "bkde";
    case ModelKind::kMonteCarlo: return "monte-carlo";
  }
  return "?";
}

struct Histogram1D {
  std::vector<double> edges;    // B + 1, strictly increasing
  std::vector<double> weights;  // B, sum to 1

  std::size_t bins() const { return weights.size(); }
  double lo() const { return edges.front(); }
  double hi() const { return edges.back(); }
};

struct Histogram2D {
  std::vector<double> edges_x;  // Bx + 1
  std::vector<double> edges_y;  // By + 1
  std::vector<double> weights;  // Bx * By, index ix * By + iy

  std::size_t bins_x() const { return edges_x.size() - 1; }
  std::size_t bins_y() const { return edges_y.size() - 1; }
  double weight(std::size_t ix, std::size_t iy) const { return weights[ix * bins_y() + iy]; }
  Rect2 bin_rect(std::size_t ix, std::size_t iy) const {
    return {edges_x[ix], edges_x[ix + 1], edges_y[iy], edges_y[iy + 1]};
  }
};

namespace detail {

// B equal-width edges over [min, max]; zero-range sets get a floor-width span.
inline std::vector<double> equal_width_edges(std::span<const double> xs, int bins) {
  auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (!(hi > lo)) {
    const double f = scale_floor(lo);
    lo -= f;
    hi += f;
  }
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) edges[i] = lo + width * i;
  edges.back() = hi;
  return edges;
}

inline std::size_t bin_index(const std::vector<double>& edges, double x) {
  const std::size_t bins = edges.size() - 1;
  const double width = (edges.back() - edges.front()) / static_cast<double>(bins);
  auto i = static_cast<std::ptrdiff_t>(std::floor((x - edges.front()) / width));
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(bins) - 1);
  // Guard against rounding at interior edges.
  auto k = static_cast<std::size_t>(i);
  while (k > 0 && x < edges[k]) --k;
  while (k + 1 < bins && x >= edges[k + 1]) ++k;
  return k;
}

}  // namespace detail

// Equal-width histogram between the sample min and max; the max sample falls
// in the last bin.
inline Histogram1D build_histogram(std::span<const double> xs, int bins) {
  if (xs.empty()) throw InvalidArgument("build_histogram: empty sample set");
  if (bins < 1) throw InvalidArgument("build_histogram: bins must be >= 1");
  Histogram1D h;
  h.edges = detail::equal_width_edges(xs, bins);
  h.weights.assign(static_cast<std::size_t>(bins), 0.0);
  const double w = 1.0 / static_cast<double>(xs.size());
  for (double x : xs) h.weights[detail::bin_index(h.edges, x)] += w;
  return h;
}

inline Histogram2D build_histogram2d(std::span<const double> xs, std::span<const double> ys, int bins) {
  if (xs.empty() || xs.size() != ys.size()) throw InvalidArgument("build_histogram2d: sample arrays must match");
  if (bins < 1) throw InvalidArgument("build_histogram2d: bins must be >= 1");
  Histogram2D h;
  h.edges_x = detail::equal_width_edges(xs, bins);
  h.edges_y = detail::equal_width_edges(ys, bins);
  h.weights.assign(static_cast<std::size_t>(bins) * bins, 0.0);
  const double w = 1.0 / static_cast<double>(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const std::size_t ix = detail::bin_index(h.edges_x, xs[k]);
    const std::size_t iy = detail::bin_index(h.edges_y, ys[k]);
    h.weights[ix * bins + iy] += w;
  }
  return h;
}

inline Histogram2D outer_product(const Histogram1D& hx, const Histogram1D& hy) {
  Histogram2D h{hx.edges, hy.edges, std::vector<double>(hx.bins() * hy.bins())};
  for (std::size_t i = 0; i < hx.bins(); ++i) {
    for (std::size_t j = 0; j < hy.bins(); ++j) h.weights[i * hy.bins() + j] = hx.weights[i] * hy.weights[j];
  }
  return h;
}

// A histogram written as uniform kernels at bin centers with half-bin-width
// bandwidth. Requires equal-width bins.
inline KernelMixture histogram_as_mixture(const Histogram1D& h) {
  KernelMixture m{KernelKind::kUniform, {}, h.weights, 0.5 * (h.hi() - h.lo()) / static_cast<double>(h.bins())};
  m.centers.reserve(h.bins());
  for (std::size_t i = 0; i < h.bins(); ++i) m.centers.push_back(0.5 * (h.edges[i] + h.edges[i + 1]));
  return m;
}

struct ParametricPair {
  ScaledKernel x;
  ScaledKernel y;
};

// Raw joint samples; the KDE models derive bandwidths from them.
struct SamplePair {
  KernelKind kernel = KernelKind::kGaussian;
  std::vector<double> x;
  std::vector<double> y;
};

struct HistogramPair {
  Histogram1D x;
  Histogram1D y;
};

struct BivariateSamples {
  std::vector<double> x;
  std::vector<double> y;
};

using VertexDistribution = std::variant<ParametricPair, SamplePair, HistogramPair, Histogram2D, BivariateSamples>;

// Builds the distribution implied by cfg from one vertex's member samples.
inline VertexDistribution make_distribution(const NoiseModelConfig& cfg, std::span<const double> xs,
                                            std::span<const double> ys) {
  switch (cfg.distribution_kind()) {
    case ModelKind::kParametric:
      return ParametricPair{fit_parametric(xs, cfg.kernel), fit_parametric(ys, cfg.kernel)};
    case ModelKind::kKde:
      return SamplePair{cfg.kernel, {xs.begin(), xs.end()}, {ys.begin(), ys.end()}};
    case ModelKind::kHistogram: return HistogramPair{build_histogram(xs, cfg.bins), build_histogram(ys, cfg.bins)};
    case ModelKind::kHistogram2D: return build_histogram2d(xs, ys, cfg.bins);
    case ModelKind::kBivariateKde: return BivariateSamples{{xs.begin(), xs.end()}, {ys.begin(), ys.end()}};
    case ModelKind::kMonteCarlo: break;
  }
  throw InvalidArgument("make_distribution: unsupported model kind");
}

}  // namespace fiberuq
