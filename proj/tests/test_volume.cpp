#include <gtest/gtest.h>

#include <cstring>

#include "fiberuq/synth.hpp"
#include "fiberuq/volume.hpp"

namespace fiberuq {
namespace {

NoiseModelConfig model(const std::string& name) {
  auto cfg = parse_model_name(name);
  if (!cfg) throw std::runtime_error("bad model " + name);
  cfg->bins = 6;
  cfg->integration_resolution = 24;
  return *cfg;
}

const std::vector<std::string> kModels{"parametric-uniform", "parametric-epanechnikov", "parametric-gaussian",
                                       "kde-uniform",        "kde-epanechnikov",        "kde-gaussian",
                                       "histogram",          "histogram2d",             "bkde"};

TEST(ModelNames, ParseAndPrint) {
  for (const auto& name : kModels) {
    const auto cfg = parse_model_name(name);
    ASSERT_TRUE(cfg) << name;
    EXPECT_EQ(model_name(cfg->kind, cfg->kernel), name);
  }
  EXPECT_TRUE(parse_model_name("monte-carlo"));
  EXPECT_FALSE(parse_model_name("kde-triangle"));
  EXPECT_FALSE(parse_model_name(""));
}

TEST(NoiseModelConfig, Validation) {
  NoiseModelConfig mc = *parse_model_name("monte-carlo");
  mc.sample_count = 100;
  EXPECT_THROW(mc.validate(), InvalidArgument);  // no seed
  mc.seed = 1;
  EXPECT_NO_THROW(mc.validate());
  mc.base_kind = ModelKind::kHistogram;
  EXPECT_THROW(mc.validate(), InvalidArgument);  // no bins
  NoiseModelConfig h = *parse_model_name("histogram");
  EXPECT_THROW(h.validate(), InvalidArgument);
  NoiseModelConfig b = *parse_model_name("bkde");
  b.integration_resolution = 1;
  EXPECT_THROW(b.validate(), InvalidArgument);
}

TEST(Volume, SingleVertexReducesToScalarCall) {
  const UniformGrid3 g{{1, 1, 1}, {0, 0, 0}, {1, 1, 1}};
  const std::vector<float> values{0.1f, 0.4f, -0.3f, 0.9f, 0.2f, 0.0f, 0.7f, -0.5f, 0.3f, 0.1f};
  const EnsembleField ens(g, 5, {"a", "b"}, values);
  std::vector<double> xs(5), ys(5);
  ens.gather(0, 0, xs);
  ens.gather(0, 1, ys);
  const TraitPolygon trait(Polygon{{-0.2, -0.4}, {0.6, -0.1}, {0.3, 0.8}});
  for (const auto& name : kModels) {
    const NoiseModelConfig cfg = model(name);
    const double expected = interior_probability(make_distribution(cfg, xs, ys), cfg, trait);
    EXPECT_EQ(compute_probability_volume(ens, cfg, trait, {1})[0], expected) << name;
  }
  const double kde = interior_prob_kde_independent(xs, ys, KernelKind::kEpanechnikov, trait);
  EXPECT_NEAR(compute_probability_volume(ens, model("kde-epanechnikov"), trait, {1})[0], kde, 1e-12);
}

TEST(Volume, ZeroVarianceEqualsCrispIndicator) {
  const BivariateField truth = tangle_sphere_ground_truth(10);
  EnsembleField ens(truth.grid, 3, {"a", "b"}, [&] {
    std::vector<float> v;
    for (int var = 0; var < 2; ++var)
      for (int m = 0; m < 3; ++m)
        for (double x : var == 0 ? truth.a1 : truth.a2) v.push_back(static_cast<float>(x));
    return v;
  }());
  const BivariateField stored = member_field(ens, 0);
  const TraitPolygon trait(Polygon{{0.5, 1.0}, {6.0, 3.0}, {5.0, 9.0}, {2.0, 7.5}});
  const ProbabilityVolume crisp = ground_truth_interior_volume(stored, trait);
  for (const auto& name : kModels) {
    if (name == "bkde") continue;  // Riemann sum over a near-delta kernel
    const ProbabilityVolume p = compute_probability_volume(ens, model(name), trait, {1});
    for (std::size_t v = 0; v < p.size(); ++v) ASSERT_NEAR(p[v], crisp[v], 1e-6) << name << " " << v;
  }
}

TEST(Volume, ThreadCountDoesNotChangeOutput) {
  const BivariateField truth = tangle_sphere_ground_truth(12);
  const auto r = attribute_ranges(truth);
  const EnsembleField ens = make_noisy_ensemble(truth, 12, default_bimodal_spec(r[0], r[1]), 4);
  const TraitPolygon trait(Polygon{{1.0, 2.0}, {8.0, 2.0}, {8.0, 9.0}, {1.0, 9.0}});
  std::vector<std::string> names = kModels;
  names.push_back("monte-carlo");
  for (const auto& name : names) {
    NoiseModelConfig cfg = model(name);
    if (name == "monte-carlo") {
      cfg.sample_count = 200;
      cfg.seed = 9;
      cfg.base_kind = ModelKind::kKde;
    }
    const ProbabilityVolume a = compute_probability_volume(ens, cfg, trait, {1});
    for (unsigned t : {4u, 16u}) {
      const ProbabilityVolume b = compute_probability_volume(ens, cfg, trait, {t});
      EXPECT_EQ(std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)), 0) << name << " " << t;
    }
  }
}

TEST(Volume, CullingStatsAndRange) {
  const BivariateField truth = tangle_sphere_ground_truth(10);
  const auto r = attribute_ranges(truth);
  const EnsembleField ens = make_noisy_ensemble(truth, 8, default_bimodal_spec(r[0], r[1]), 4);
  const TraitPolygon trait(Polygon{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  VolumeStats stats;
  const ProbabilityVolume p = compute_probability_volume(ens, model("parametric-epanechnikov"), trait, {2}, &stats);
  EXPECT_GT(stats.culled, 0u);
  EXPECT_LT(stats.culled, p.size());
  EXPECT_GE(stats.seconds, 0.0);
}

TEST(Volume, VertexFailureNamesCoordinates) {
  const UniformGrid3 g{{2, 2, 1}, {0, 0, 0}, {1, 1, 1}};
  const EnsembleField ens(g, 1, {"a", "b"}, std::vector<float>(8, 0.5f));
  const TraitPolygon trait(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  try {
    compute_probability_volume(ens, model("bkde"), trait, {2});  // one member: no covariance
    FAIL() << "expected VertexError";
  } catch (const VertexError& e) {
    EXPECT_NE(std::string(e.what()).find("vertex 0 (0, 0, 0)"), std::string::npos) << e.what();
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for_index(hits.size(), 7, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

}  // namespace
}  // namespace fiberuq
