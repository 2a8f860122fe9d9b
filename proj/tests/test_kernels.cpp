#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fiberuq/kernels.hpp"
#include "oracles.hpp"

namespace fiberuq {
namespace {

constexpr KernelKind kAll[] = {KernelKind::kUniform, KernelKind::kEpanechnikov, KernelKind::kGaussian};

TEST(UnitKernel, PdfAtZero) {
  EXPECT_DOUBLE_EQ(unit_pdf(KernelKind::kUniform, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(unit_pdf(KernelKind::kEpanechnikov, 0.0), 0.75);
  EXPECT_NEAR(unit_pdf(KernelKind::kGaussian, 0.0), 0.3989422804014327, 1e-15);
  EXPECT_EQ(unit_pdf(KernelKind::kUniform, 1.5), 0.0);
  EXPECT_EQ(unit_pdf(KernelKind::kEpanechnikov, -1.01), 0.0);
}

TEST(UnitKernel, CdfValues) {
  EXPECT_DOUBLE_EQ(unit_cdf(KernelKind::kUniform, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(unit_cdf(KernelKind::kGaussian, 0.0), 0.5);
  // Oracle: Simpson quadrature of 3/4 (1 - x^2) over [-1, 0.5]; frozen value 0.84375.
  const double oracle = test::simpson([](double x) { return 0.75 * (1.0 - x * x); }, -1.0, 0.5, 1000);
  EXPECT_NEAR(oracle, 0.84375, 1e-12);
  EXPECT_NEAR(unit_cdf(KernelKind::kEpanechnikov, 0.5), 0.84375, 1e-15);
  for (KernelKind k : {KernelKind::kUniform, KernelKind::kEpanechnikov}) {
    EXPECT_EQ(unit_cdf(k, -1.0), 0.0);
    EXPECT_EQ(unit_cdf(k, -3.0), 0.0);
    EXPECT_EQ(unit_cdf(k, 1.0), 1.0);
  }
}

TEST(UnitKernel, IntegratesToOne) {
  for (KernelKind k : kAll) {
    const auto f = [k](double u) { return unit_pdf(k, u); };
    const double r = is_compact(k) ? 1.0 : 9.0;
    const double total = test::simpson(f, -r, r, 4000);
    EXPECT_NEAR(total, 1.0, 1e-9) << to_string(k);
  }
}

TEST(UnitKernel, CdfDerivativeMatchesPdf) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-5;
  for (KernelKind k : kAll) {
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      if (is_compact(k) && std::abs(std::abs(x) - 1.0) < 1e-3) continue;
      const double fd = (unit_cdf(k, x + h) - unit_cdf(k, x - h)) / (2 * h);
      EXPECT_NEAR(fd, unit_pdf(k, x), 1e-6) << to_string(k) << " at " << x;
    }
  }
}

TEST(UnitKernel, CdfSymmetry) {
  for (KernelKind k : kAll) {
    for (double x : {0.0, 0.1, 0.5, 0.99, 1.0, 2.0, 5.0}) {
      EXPECT_NEAR(unit_cdf(k, -x), 1.0 - unit_cdf(k, x), 1e-15) << to_string(k);
    }
  }
}

TEST(ScaledKernel, ScalingRule) {
  const ScaledKernel u{KernelKind::kUniform, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(u.pdf(2.0), 1.0 / 6.0);
  const ScaledKernel g{KernelKind::kGaussian, 1.5, 0.25};
  EXPECT_NEAR(g.pdf(1.5), 0.3989422804014327 / 0.25, 1e-14);
  for (KernelKind k : kAll) {
    const ScaledKernel s{k, -4.0, 0.7};
    EXPECT_EQ(s.cdf(-1e6), 0.0);
    EXPECT_EQ(s.cdf(1e6), 1.0);
    EXPECT_NEAR(s.cdf(-3.5), unit_cdf(k, 0.5 / 0.7), 1e-15);
  }
}

TEST(Silverman, StandardNormal) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> xs(1000);
  for (double& x : xs) x = n(rng);
  // Direct evaluation of the rule on the same samples.
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sigma = std::sqrt(var / xs.size());
  std::vector<double> s = xs;
  std::sort(s.begin(), s.end());
  auto q = [&](double p) {
    const double pos = p * (s.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    return s[i] + (pos - i) * (s[i + 1] - s[i]);
  };
  const double expected = 0.9 * std::min(sigma, (q(0.75) - q(0.25)) / 1.34) * std::pow(1000.0, -0.2);
  EXPECT_NEAR(silverman_bandwidth(xs), expected, 1e-14);
  EXPECT_NEAR(silverman_bandwidth(xs), 0.9 * std::pow(1000.0, -0.2), 0.02);
}

TEST(Silverman, ScaleEquivarianceAndErrors) {
  std::vector<double> xs{0.3, 1.2, -0.7, 2.2, 0.9, -1.5, 0.1};
  std::vector<double> scaled;
  for (double x : xs) scaled.push_back(10 * x);
  EXPECT_NEAR(silverman_bandwidth(scaled), 10 * silverman_bandwidth(xs), 1e-12);
  EXPECT_THROW(silverman_bandwidth(std::vector<double>{1.0}), DegenerateSamples);
  EXPECT_THROW(silverman_bandwidth(std::vector<double>{2.0, 2.0, 2.0}), DegenerateSamples);
  EXPECT_DOUBLE_EQ(kde_bandwidth(std::vector<double>{2.0, 2.0, 2.0}), scale_floor(2.0));
}

TEST(FitParametric, Examples) {
  const ScaledKernel u = fit_parametric(std::vector<double>{0.0, 1.0}, KernelKind::kUniform);
  EXPECT_DOUBLE_EQ(u.center, 0.5);
  EXPECT_DOUBLE_EQ(u.bandwidth, 0.5);
  const ScaledKernel g = fit_parametric(std::vector<double>{-1.0, 1.0}, KernelKind::kGaussian);
  EXPECT_DOUBLE_EQ(g.center, 0.0);
  EXPECT_DOUBLE_EQ(g.bandwidth, 1.0);
  const ScaledKernel c = fit_parametric(std::vector<double>{3.0, 3.0, 3.0}, KernelKind::kGaussian);
  EXPECT_DOUBLE_EQ(c.center, 3.0);
  EXPECT_DOUBLE_EQ(c.bandwidth, scale_floor(3.0));
}

TEST(FitParametric, EpanechnikovVarianceMatchesSamples) {
  std::vector<double> xs{0.3, 1.2, -0.7, 2.2, 0.9, -1.5, 0.1, 4.0};
  const ScaledKernel e = fit_parametric(xs, KernelKind::kEpanechnikov);
  // Variance of the scaled kernel, by quadrature.
  const double var = test::simpson([&](double x) { return (x - e.center) * (x - e.center) * e.pdf(x); },
                                   e.center - e.bandwidth, e.center + e.bandwidth, 4000);
  const double s = sample_stddev(xs);
  EXPECT_NEAR(var, s * s, 1e-10);
  EXPECT_NEAR(e.bandwidth * e.bandwidth / 5.0, s * s, 1e-12);
}

}  // namespace
}  // namespace fiberuq
