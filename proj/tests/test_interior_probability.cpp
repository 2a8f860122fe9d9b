#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fiberuq/bkde.hpp"
#include "fiberuq/distribution.hpp"
#include "fiberuq/interior_probability.hpp"
#include "fiberuq/monte_carlo.hpp"
#include "oracles.hpp"

namespace fiberuq {
namespace {

constexpr KernelKind kAll[] = {KernelKind::kUniform, KernelKind::kEpanechnikov, KernelKind::kGaussian};

TraitPolygon rect_trait(const Rect2& r) { return TraitPolygon(Polygon{{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}}); }

// Piecewise-linear CDF of a histogram, written out directly.
double hist_cdf(const Histogram1D& h, double x) {
  double c = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double lo = h.edges[i], hi = h.edges[i + 1];
    if (x >= hi) c += h.weights[i];
    else if (x > lo) c += h.weights[i] * (x - lo) / (hi - lo);
  }
  return c;
}

std::vector<double> bimodal_samples(std::mt19937_64& rng, int m, double main, double outlier, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  std::bernoulli_distribution pick(0.2);
  std::vector<double> xs(m);
  for (double& x : xs) x = (pick(rng) ? outlier : main) + n(rng);
  return xs;
}

TEST(EdgeIntegral, ZeroLengthEdge) {
  const ScaledKernel g{KernelKind::kGaussian, 0.0, 1.0};
  EXPECT_EQ(edge_integral_independent(Vec2{0.3, 0.2}, Vec2{0.3, 0.2}, g, g), 0.0);
}

TEST(EdgeIntegral, UniformSquareSumsToOne) {
  const ScaledKernel u{KernelKind::kUniform, 0.0, 1.0};
  const Polygon sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) total += edge_integral_independent(sq[i], sq[(i + 1) % 4], u, u);
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(EdgeIntegral, GaussianMatchesSimpsonOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> s(0.3, 2.0);
  for (int iter = 0; iter < 50; ++iter) {
    const ScaledKernel px{KernelKind::kGaussian, u(rng), s(rng)};
    const ScaledKernel py{KernelKind::kGaussian, u(rng), s(rng)};
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    // L dx + M dy with L = -1/2 f_X F_Y and M = 1/2 F_X f_Y along a + t (b - a).
    auto f = [&](double t) {
      const double x = a.x + t * (b.x - a.x), y = a.y + t * (b.y - a.y);
      const double zx = (x - px.center) / px.bandwidth, zy = (y - py.center) / py.bandwidth;
      const double fx = test::normal_pdf(zx) / px.bandwidth, fy = test::normal_pdf(zy) / py.bandwidth;
      return -0.5 * fx * test::normal_cdf(zy) * (b.x - a.x) + 0.5 * test::normal_cdf(zx) * fy * (b.y - a.y);
    };
    const double oracle = test::simpson(f, 0.0, 1.0, 20000);
    EXPECT_NEAR(edge_integral_independent(a, b, px, py), oracle, 1e-8);
  }
}

TEST(InteriorProbRect, GaussianUnitSquareMonteCarlo) {
  const ScaledKernel g{KernelKind::kGaussian, 0.0, 1.0};
  const double p = interior_prob_rect(g, g, Rect2{-1, 1, -1, 1});
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n;
  std::int64_t hits = 0;
  const std::int64_t draws = 10'000'000;
  for (std::int64_t k = 0; k < draws; ++k) {
    const double x = n(rng), y = n(rng);
    if (std::abs(x) <= 1 && std::abs(y) <= 1) ++hits;
  }
  EXPECT_NEAR(p, static_cast<double>(hits) / draws, 3e-4);
  EXPECT_NEAR(p, std::pow(std::erf(1.0 / std::sqrt(2.0)), 2), 1e-14);
}

TEST(InteriorProbRect, TrivialCases) {
  const ScaledKernel u{KernelKind::kUniform, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(interior_prob_rect(u, u, Rect2{-2, 2, -2, 2}), 1.0);
  EXPECT_DOUBLE_EQ(interior_prob_rect(u, u, Rect2{3, 4, 3, 4}), 0.0);
}

TEST(InteriorProbParametric, UniformTriangleIsHalf) {
  const ScaledKernel u{KernelKind::kUniform, 0.0, 1.0};
  const TraitPolygon tri(Polygon{{-1, -1}, {1, -1}, {1, 1}});
  EXPECT_NEAR(interior_prob_parametric(u, u, tri), 0.5, 1e-14);
  const TraitPolygon far(Polygon{{5, 5}, {6, 5}, {6, 6}});
  EXPECT_EQ(interior_prob_parametric(u, u, far), 0.0);
}

TEST(InteriorProbParametric, GaussianSevenGonMonteCarlo) {
  const Polygon poly = test::seven_gon();
  const TraitPolygon trait(poly);
  const ScaledKernel px{KernelKind::kGaussian, 0.1, 0.7};
  const ScaledKernel py{KernelKind::kGaussian, -0.2, 0.9};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nx(px.center, px.bandwidth), ny(py.center, py.bandwidth);
  std::int64_t hits = 0;
  const std::int64_t draws = 10'000'000;
  for (std::int64_t k = 0; k < draws; ++k) {
    const double x = nx(rng), y = ny(rng);
    if (test::crossing_inside(poly, x, y)) ++hits;
  }
  EXPECT_NEAR(interior_prob_parametric(px, py, trait), static_cast<double>(hits) / draws, 3e-4);
}

TEST(InteriorProbParametric, ConsistencyErrorSlackConstant) {
  EXPECT_NO_THROW(checked_probability(1.0 + 5e-10));
  EXPECT_THROW(checked_probability(1.0 + 1e-8), ConsistencyError);
  EXPECT_THROW(checked_probability(-1e-8), ConsistencyError);
  EXPECT_EQ(checked_probability(-5e-10), 0.0);
}

TEST(InteriorProbKde, SingleSampleEqualsParametric) {
  const TraitPolygon trait(test::seven_gon());
  for (KernelKind k : kAll) {
    const std::vector<double> xs{0.2}, ys{-0.1};
    const double h_x = kde_bandwidth(xs), h_y = kde_bandwidth(ys);
    const double expected =
        interior_prob_parametric(ScaledKernel{k, 0.2, h_x}, ScaledKernel{k, -0.1, h_y}, trait);
    EXPECT_NEAR(interior_prob_kde_independent(xs, ys, k, trait), expected, 1e-15);
  }
}

TEST(InteriorProbKde, IdenticalSamplesInsideGiveOne) {
  const TraitPolygon trait(test::seven_gon());
  const std::vector<double> xs(10, 0.0), ys(10, 0.0);
  for (KernelKind k : kAll) EXPECT_NEAR(interior_prob_kde_independent(xs, ys, k, trait), 1.0, 1e-9);
}

TEST(InteriorProbKde, BimodalMatchesMixtureSampling) {
  std::mt19937_64 rng(40);
  const std::vector<double> xs = bimodal_samples(rng, 40, 0.0, 1.5, 0.3);
  const std::vector<double> ys = bimodal_samples(rng, 40, 0.2, -1.2, 0.25);
  const Polygon poly = test::seven_gon();
  const TraitPolygon trait(poly);
  const double hx = kde_bandwidth(xs), hy = kde_bandwidth(ys);
  // The independent KDE draws x and y from their own mixtures.
  std::uniform_int_distribution<std::size_t> pick(0, 39);
  std::normal_distribution<double> n;
  std::int64_t hits = 0;
  const std::int64_t draws = 4'000'000;
  for (std::int64_t k = 0; k < draws; ++k) {
    const double x = xs[pick(rng)] + hx * n(rng);
    const double y = ys[pick(rng)] + hy * n(rng);
    if (test::crossing_inside(poly, x, y)) ++hits;
  }
  const double oracle = static_cast<double>(hits) / draws;
  EXPECT_NEAR(interior_prob_kde_independent(xs, ys, KernelKind::kGaussian, trait), oracle, 1e-3);
  EXPECT_NEAR(interior_prob_kde_independent(xs, ys, KernelKind::kGaussian, trait, {KdeEvaluation::kMixture}), oracle,
              1e-3);
}

TEST(InteriorProbKde, PairwiseAndMixtureAgree) {
  std::mt19937_64 rng(41);
  const TraitPolygon trait(test::seven_gon());
  for (KernelKind k : kAll) {
    const std::vector<double> xs = bimodal_samples(rng, 25, 0.0, 1.0, 0.4);
    const std::vector<double> ys = bimodal_samples(rng, 25, 0.0, -1.0, 0.4);
    EXPECT_NEAR(interior_prob_kde_independent(xs, ys, k, trait, {KdeEvaluation::kPairwise}),
                interior_prob_kde_independent(xs, ys, k, trait, {KdeEvaluation::kMixture}), 1e-12)
        << to_string(k);
  }
}

TEST(InteriorProbKde, CullingNeverChangesResults) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int iter = 0; iter < 30; ++iter) {
    const TraitPolygon trait(test::random_star_polygon(rng, {u(rng), u(rng)}, 0.2, 1.0, 3 + iter % 6));
    const std::vector<double> xs = bimodal_samples(rng, 20, u(rng), u(rng), 0.3);
    const std::vector<double> ys = bimodal_samples(rng, 20, u(rng), u(rng), 0.3);
    for (KernelKind k : kAll) {
      EXPECT_NEAR(interior_prob_kde_independent(xs, ys, k, trait, {KdeEvaluation::kPairwise, true}),
                  interior_prob_kde_independent(xs, ys, k, trait, {KdeEvaluation::kPairwise, false}), 1e-14);
    }
  }
}

TEST(InteriorProbHist, TrivialCases) {
  const Histogram1D one{{0.0, 1.0}, {1.0}};
  EXPECT_NEAR(interior_prob_hist_independent(one, one, rect_trait({-1, 2, -1, 2})), 1.0, 1e-15);
  EXPECT_NEAR(interior_prob_hist_independent(one, one, rect_trait({0, 0.5, -1, 2})), 0.5, 1e-15);
  const TraitPolygon diag_half(Polygon{{0, 0}, {1, 0}, {1, 1}});
  EXPECT_NEAR(interior_prob_hist_independent(one, one, diag_half), 0.5, 1e-15);
}

TEST(InteriorProbHist, MatchesEquivalentUniformKde) {
  std::mt19937_64 rng(1000);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> xs(1000), ys(1000);
  for (double& x : xs) x = n(rng);
  for (double& y : ys) y = 0.5 * n(rng) + 0.3;
  const Histogram1D hx = build_histogram(xs, 8), hy = build_histogram(ys, 8);
  // Equivalent KDE written out explicitly: bins as weighted uniform kernels.
  auto as_kernels = [](const Histogram1D& h) {
    KernelMixture m{KernelKind::kUniform, {}, {}, 0.5 * (h.edges[1] - h.edges[0])};
    for (std::size_t i = 0; i < h.bins(); ++i) {
      m.centers.push_back(h.edges[i] + m.bandwidth);
      m.weights.push_back(h.weights[i]);
    }
    return m;
  };
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int iter = 0; iter < 20; ++iter) {
    const TraitPolygon trait(test::random_star_polygon(rng, {u(rng), u(rng)}, 0.2, 1.5, 3 + iter % 8));
    double pairwise = 0.0;
    const KernelMixture mx = as_kernels(hx), my = as_kernels(hy);
    for (std::size_t i = 0; i < mx.size(); ++i) {
      for (std::size_t j = 0; j < my.size(); ++j) {
        pairwise += mx.weight(i) * my.weight(j) * interior_prob_parametric(mx.component(i), my.component(j), trait);
      }
    }
    EXPECT_NEAR(interior_prob_hist_independent(hx, hy, trait), pairwise, 1e-12);
  }
}

TEST(InteriorProbHist2D, Cases) {
  Histogram2D one{{0, 1}, {0, 1}, {1.0}};
  EXPECT_NEAR(interior_prob_hist2d(one, rect_trait({-1, 2, -1, 2})), 1.0, 1e-15);
  // Correlated: mass on the diagonal bins (0,0) and (1,1).
  Histogram2D diag{{0, 1, 2}, {0, 1, 2}, {0.7, 0.0, 0.0, 0.3}};
  EXPECT_NEAR(interior_prob_hist2d(diag, rect_trait({1, 2, 1, 2})), 0.3, 1e-15);
  EXPECT_NEAR(interior_prob_hist2d(diag, rect_trait({0, 1, 0, 1})), 0.7, 1e-15);
  EXPECT_NEAR(interior_prob_hist2d(diag, rect_trait({0, 1, 1, 2})), 0.0, 1e-15);
}

TEST(InteriorProbHist2D, FactorizationIdentity) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> bins(1, 12);
  for (int iter = 0; iter < 100; ++iter) {
    const std::vector<double> xs = bimodal_samples(rng, 50, u(rng), u(rng), 0.4);
    const std::vector<double> ys = bimodal_samples(rng, 50, u(rng), u(rng), 0.4);
    const Histogram1D hx = build_histogram(xs, bins(rng)), hy = build_histogram(ys, bins(rng));
    const TraitPolygon trait(test::random_star_polygon(rng, {u(rng), u(rng)}, 0.2, 1.2, 3 + iter % 8));
    EXPECT_NEAR(interior_prob_hist2d(outer_product(hx, hy), trait), interior_prob_hist_independent(hx, hy, trait),
                1e-12);
  }
}

TEST(BuildHistogram, MaxSampleInLastBinAndWeights) {
  const std::vector<double> xs{0.0, 0.25, 0.5, 0.75, 1.0};
  const Histogram1D h = build_histogram(xs, 4);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_EQ(h.edges.back(), 1.0);
  EXPECT_DOUBLE_EQ(h.weights[3], 0.4);
  double total = 0.0;
  for (double w : h.weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(InteriorProbBkde, DiagonalGaussianMatchesClosedForm) {
  // Reflecting the y samples about zero makes the sample covariance exactly
  // diagonal, so the bivariate KDE is a sum of independent Gaussian pairs.
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nx(0.0, 0.8), ny(0.0, 0.5);
  std::vector<double> xs, ys;
  for (int k = 0; k < 60; ++k) {
    const double x = nx(rng), y = ny(rng);
    xs.insert(xs.end(), {x, x});
    ys.insert(ys.end(), {y, -y});
  }
  const BivariateKde kde(xs, ys);
  ASSERT_NEAR(kde.bandwidth().xy, 0.0, 1e-15);
  const TraitPolygon trait(test::seven_gon());
  double closed = 0.0;
  const double hx = std::sqrt(kde.bandwidth().xx), hy = std::sqrt(kde.bandwidth().yy);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    closed += interior_prob_parametric(ScaledKernel{KernelKind::kGaussian, xs[k], hx},
                                       ScaledKernel{KernelKind::kGaussian, ys[k], hy}, trait);
  }
  closed /= static_cast<double>(xs.size());
  const double e64 = std::abs(interior_prob_bkde(kde, 64, trait) - closed);
  const double e256 = std::abs(interior_prob_bkde(kde, 256, trait) - closed);
  EXPECT_LT(e256, 5e-3);
  EXPECT_LE(e256, e64 + 1e-12);
}

TEST(InteriorProbBkde, FarTraitAndFullCoverage) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  std::vector<double> xs(80), ys(80);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = n(rng);
    ys[k] = 0.6 * xs[k] + 0.5 * n(rng);
  }
  EXPECT_EQ(interior_prob_bkde(xs, ys, 64, rect_trait({50, 60, 50, 60})), 0.0);
  const BivariateKde kde(xs, ys);
  const Rect2 box = kde.padded_support();
  const TraitPolygon all = rect_trait({box.x0 - 1, box.x1 + 1, box.y0 - 1, box.y1 + 1});
  EXPECT_NEAR(interior_prob_bkde(kde, 64, all), 1.0, 2e-2);
  EXPECT_NEAR(interior_prob_bkde(kde, 64, all, {true}), 1.0, 1e-12);
}

TEST(InteriorProbBkde, SingularCovarianceFallsBack) {
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0}, ys{1.0, 1.0, 1.0, 1.0};
  const BandwidthMatrix h = scott_bandwidth(xs, ys);
  EXPECT_GT(h.det(), 0.0);
  EXPECT_EQ(h.xy, 0.0);
  const std::vector<double> line_y{0.0, 2.0, 4.0, 6.0};  // perfectly correlated
  EXPECT_EQ(scott_bandwidth(xs, line_y).xy, 0.0);
}

TEST(MonteCarlo, DeterminismAndCoverage) {
  const VertexDistribution d = ParametricPair{{KernelKind::kUniform, 0, 1}, {KernelKind::kUniform, 0, 1}};
  const TraitPolygon all = rect_trait({-5, 5, -5, 5});
  EXPECT_EQ(interior_prob_monte_carlo(d, all, 10, 1), 1.0);
  EXPECT_EQ(interior_prob_monte_carlo(d, all, 1000, 3), 1.0);
  const TraitPolygon half = rect_trait({-1, 0, -1, 1});
  EXPECT_EQ(interior_prob_monte_carlo(d, half, 5000, 17, 4), interior_prob_monte_carlo(d, half, 5000, 17, 4));
  EXPECT_NE(interior_prob_monte_carlo(d, half, 5000, 17, 4), interior_prob_monte_carlo(d, half, 5000, 17, 5));
  EXPECT_NEAR(interior_prob_monte_carlo(d, half, 1'000'000, 2), 0.5, 3 * 0.5 / std::sqrt(1e6));
}

TEST(MonteCarlo, EpanechnikovSamplerMoments) {
  Rng rng = make_stream(8, 0);
  double s1 = 0, s2 = 0;
  const int n = 400'000;
  for (int k = 0; k < n; ++k) {
    const double u = sample_unit_kernel(KernelKind::kEpanechnikov, rng);
    ASSERT_LE(std::abs(u), 1.0);
    s1 += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4e-3);
  EXPECT_NEAR(s2 / n, 0.2, 2e-3);
}

// Properties over all independent models.

struct ModelCase {
  std::string name;
  std::function<double(const TraitPolygon&)> prob;
  std::function<double(const Rect2&)> product;  // product-of-CDF-differences
};

std::vector<ModelCase> independent_models(std::mt19937_64& rng, double shift_x = 0.0, double shift_y = 0.0) {
  std::vector<ModelCase> out;
  std::uniform_real_distribution<double> c(-0.5, 0.5), s(0.3, 1.2);
  for (KernelKind k : kAll) {
    const ScaledKernel px{k, c(rng) + shift_x, s(rng)}, py{k, c(rng) + shift_y, s(rng)};
    out.push_back({"parametric-" + std::string(to_string(k)), [=](const TraitPolygon& t) { return interior_prob_parametric(px, py, t); },
                   [=](const Rect2& r) { return interior_prob_rect(px, py, r); }});
  }
  std::vector<double> xs = bimodal_samples(rng, 30, 0.0, 1.0, 0.3), ys = bimodal_samples(rng, 30, 0.0, -1.0, 0.3);
  for (double& x : xs) x += shift_x;
  for (double& y : ys) y += shift_y;
  for (KernelKind k : kAll) {
    const KernelMixture mx = make_kde(xs, k), my = make_kde(ys, k);
    out.push_back({"kde-" + std::string(to_string(k)), [=](const TraitPolygon& t) { return interior_prob_kde_independent(xs, ys, k, t); },
                   [=](const Rect2& r) { return interior_prob_rect(mx, my, r); }});
  }
  const Histogram1D hx = build_histogram(xs, 6), hy = build_histogram(ys, 6);
  out.push_back({"histogram", [=](const TraitPolygon& t) { return interior_prob_hist_independent(hx, hy, t); },
                 [=](const Rect2& r) {
                   return (hist_cdf(hx, r.x1) - hist_cdf(hx, r.x0)) * (hist_cdf(hy, r.y1) - hist_cdf(hy, r.y0));
                 }});
  return out;
}

TEST(Properties, RectangleConsistency) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 1.0), w(0.2, 2.5);
  for (int iter = 0; iter < 20; ++iter) {
    for (const ModelCase& m : independent_models(rng)) {
      const double x0 = u(rng), y0 = u(rng);
      const Rect2 r{x0, x0 + w(rng), y0, y0 + w(rng)};
      const double tol = m.name.find("gaussian") != std::string::npos ? 1e-7 : 1e-9;
      EXPECT_NEAR(m.prob(rect_trait(r)), m.product(r), tol) << m.name;
    }
  }
}

TEST(Properties, MonotoneInNestedRectangles) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> grow(0.0, 0.5);
  for (int iter = 0; iter < 10; ++iter) {
    for (const ModelCase& m : independent_models(rng)) {
      Rect2 r{-0.3, 0.2, -0.1, 0.4};
      double prev = m.prob(rect_trait(r));
      for (int step = 0; step < 5; ++step) {
        r = Rect2{r.x0 - grow(rng), r.x1 + grow(rng), r.y0 - grow(rng), r.y1 + grow(rng)};
        const double p = m.prob(rect_trait(r));
        EXPECT_GE(p, prev - 1e-12) << m.name;
        prev = p;
      }
    }
  }
}

TEST(Properties, ComplementOnRectangleSplits) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> cut(-0.5, 0.5);
  for (int iter = 0; iter < 10; ++iter) {
    for (const ModelCase& m : independent_models(rng)) {
      if (m.name.find("gaussian") != std::string::npos) continue;  // compact support only
      const Rect2 big{-20, 20, -20, 20};
      const double c = cut(rng);
      const double whole = m.prob(rect_trait(big));
      const double left = m.prob(rect_trait({big.x0, c, big.y0, big.y1}));
      const double right = m.prob(rect_trait({c, big.x1, big.y0, big.y1}));
      EXPECT_NEAR(left + right, whole, 1e-9) << m.name;
      EXPECT_NEAR(whole, 1.0, 1e-9) << m.name;
    }
  }
}

TEST(Properties, TranslationEquivariance) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int iter = 0; iter < 5; ++iter) {
    const double dx = 3.7 * (iter + 1), dy = -1.9 * (iter + 1);
    std::mt19937_64 rng_a(30 + iter), rng_b(30 + iter);
    const auto base = independent_models(rng_a);
    const auto moved = independent_models(rng_b, dx, dy);
    std::mt19937_64 prng(iter);
    const Polygon poly = test::random_star_polygon(prng, {0.1, -0.1}, 0.3, 1.3, 6);
    Polygon shifted;
    for (Vec2 p : poly) shifted.push_back({p.x + dx, p.y + dy});
    const TraitPolygon t0(poly), t1(shifted);
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(base[i].prob(t0), moved[i].prob(t1), 1e-12) << base[i].name;
    }
  }
}

TEST(Properties, AlwaysInUnitInterval) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int iter = 0; iter < 20; ++iter) {
    const TraitPolygon t(test::random_star_polygon(rng, {u(rng), u(rng)}, 0.05, 2.0, 3 + iter % 10));
    for (const ModelCase& m : independent_models(rng)) {
      const double p = m.prob(t);
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

}  // namespace
}  // namespace fiberuq
