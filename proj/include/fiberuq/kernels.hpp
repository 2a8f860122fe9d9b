#pragma once

// Uniform, Epanechnikov and Gaussian kernels with their CDFs, scaled
// kernels and weighted kernel mixtures (1D KDE), Silverman bandwidths and
// parametric fitting of per-vertex samples.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fiberuq/error.hpp"

namespace fiberuq {

enum class KernelKind { kUniform, kEpanechnikov, kGaussian };

inline std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::kUniform: return "uniform";
    case KernelKind::kEpanechnikov: return "epanechnikov";
    case KernelKind::kGaussian: return "gaussian";
  }
  return "?";
}

inline std::optional<KernelKind> parse_kernel(std::string_view s) {
  if (s == "uniform") return KernelKind::kUniform;
  if (s == "epanechnikov") return KernelKind::kEpanechnikov;
  if (s == "gaussian") return KernelKind::kGaussian;
  return std::nullopt;
}

inline constexpr bool is_compact(KernelKind k) { return k != KernelKind::kGaussian; }

// Gaussian kernels are truncated at this many bandwidths for clipping and
// culling; the mass beyond is below 1e-14.
inline constexpr double kGaussianTruncation = 8.0;

// Half-width of the region that carries the kernel's mass, in bandwidths.
inline constexpr double support_radius(KernelKind k) { return is_compact(k) ? 1.0 : kGaussianTruncation; }

inline double unit_pdf(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::kUniform: return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    case KernelKind::kEpanechnikov: return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelKind::kGaussian: return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

// Antiderivative of the unit kernel with the constant fixed so that CDF(-inf) = 0.
inline double unit_cdf(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::kUniform:
      if (u <= -1.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return 0.5 * u + 0.5;
    case KernelKind::kEpanechnikov:
      if (u <= -1.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return 0.75 * (u - u * u * u / 3.0) + 0.5;
    case KernelKind::kGaussian: return 0.5 * std::erfc(-u / std::numbers::sqrt2);
  }
  return 0.0;
}

// Floor applied to bandwidths/scales of zero-spread sample sets.
inline double scale_floor(double center) { return std::max(1e-12, 1e-9 * std::abs(center)); }

// K_h(x - c) = K((x - c) / h) / h.
struct ScaledKernel {
  KernelKind kind = KernelKind::kGaussian;
  double center = 0.0;
  double bandwidth = 1.0;

  double pdf(double x) const { return unit_pdf(kind, (x - center) / bandwidth) / bandwidth; }
  double cdf(double x) const { return unit_cdf(kind, (x - center) / bandwidth); }

  double support_lo() const { return center - support_radius(kind) * bandwidth; }
  double support_hi() const { return center + support_radius(kind) * bandwidth; }

  // Points where the density stops being a single polynomial.
  template <class Out>
  void breakpoints(Out&& out) const {
    if (is_compact(kind)) {
      out(center - bandwidth);
      out(center + bandwidth);
    }
  }
};

// Weighted mixture of identically scaled kernels: a 1D KDE (uniform weights)
// or the kernel form of a histogram (bin weights).
struct KernelMixture {
  KernelKind kind = KernelKind::kGaussian;
  std::vector<double> centers;
  // Empty means 1/m each.
  std::vector<double> weights;
  double bandwidth = 1.0;

  std::size_t size() const { return centers.size(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 / static_cast<double>(centers.size()) : weights[i]; }

  ScaledKernel component(std::size_t i) const { return {kind, centers[i], bandwidth}; }

  double pdf(double x) const {
    double s = 0.0;
    const double inv_h = 1.0 / bandwidth;
    for (std::size_t i = 0; i < centers.size(); ++i) s += weight(i) * unit_pdf(kind, (x - centers[i]) * inv_h);
    return s * inv_h;
  }

  double cdf(double x) const {
    double s = 0.0;
    const double inv_h = 1.0 / bandwidth;
    for (std::size_t i = 0; i < centers.size(); ++i) s += weight(i) * unit_cdf(kind, (x - centers[i]) * inv_h);
    return s;
  }

  double support_lo() const {
    return *std::min_element(centers.begin(), centers.end()) - support_radius(kind) * bandwidth;
  }
  double support_hi() const {
    return *std::max_element(centers.begin(), centers.end()) + support_radius(kind) * bandwidth;
  }

  template <class Out>
  void breakpoints(Out&& out) const {
    if (!is_compact(kind)) return;
    for (double c : centers) {
      out(c - bandwidth);
      out(c + bandwidth);
    }
  }
};

inline double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Population convention: divides by m.
inline double sample_stddev(std::span<const double> xs) {
  const double mu = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

// Linear-interpolation quantile of sorted data (the common "type 7" rule).
inline double sorted_quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// h = 0.9 * min(sigma, IQR / 1.34) * m^(-1/5). When the IQR collapses to zero
// but sigma does not (heavily tied samples), sigma alone is used.
inline double silverman_bandwidth(std::span<const double> xs) {
  if (xs.size() < 2) throw DegenerateSamples("Silverman bandwidth needs at least 2 samples");
  const double sigma = sample_stddev(xs);
  if (!(sigma > 0.0)) throw DegenerateSamples("Silverman bandwidth: all samples are equal");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
  return 0.9 * spread * std::pow(static_cast<double>(xs.size()), -0.2);
}

// Silverman bandwidth, or the floor for degenerate sample sets.
inline double kde_bandwidth(std::span<const double> xs) {
  try {
    return std::max(silverman_bandwidth(xs), scale_floor(sample_mean(xs)));
  } catch (const DegenerateSamples&) {
    return scale_floor(sample_mean(xs));
  }
}

inline KernelMixture make_kde(std::span<const double> xs, KernelKind kind) {
  return KernelMixture{kind, std::vector<double>(xs.begin(), xs.end()), {}, kde_bandwidth(xs)};
}

// Moment-style fit of one kernel to a sample set:
//   gaussian      -> (mean, std)
//   uniform       -> (midrange, half-range)
//   epanechnikov  -> (mean, sqrt(5) * std), so that the kernel variance h^2/5 equals the sample variance
inline ScaledKernel fit_parametric(std::span<const double> xs, KernelKind kind) {
  if (xs.empty()) throw InvalidArgument("fit_parametric: empty sample set");
  double center = 0.0;
  double scale = 0.0;
  switch (kind) {
    case KernelKind::kGaussian:
      center = sample_mean(xs);
      scale = sample_stddev(xs);
      break;
    case KernelKind::kUniform: {
      const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
      center = 0.5 * (*lo + *hi);
      scale = 0.5 * (*hi - *lo);
      break;
    }
    case KernelKind::kEpanechnikov:
      center = sample_mean(xs);
      scale = std::sqrt(5.0) * sample_stddev(xs);
      break;
  }
  return {kind, center, std::max(scale, scale_floor(center))};
}

}  // namespace fiberuq
