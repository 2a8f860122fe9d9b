// fiberuq command-line frontend: gen, compute, extract, error, scatter.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fiberuq/fiberuq.hpp"
#include "fiberuq/model_config.hpp"

namespace fs = std::filesystem;
using namespace fiberuq;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenArgs {
  std::string kind;
  int res = 32;
  int members = 40;
  std::uint64_t seed = 0;
  std::string input;
  int block = 2;
  std::string out;
  unsigned threads = 0;
};

struct ComputeArgs {
  std::string ensemble, trait, out;
  ModelOptions model;
  unsigned threads = 0;
};

struct ExtractArgs {
  std::string prob, mode, out, field, trait;
  std::string thresholds;
};

struct ErrorArgs {
  std::string a, b;
};

struct ScatterArgs {
  std::string ensemble, out;
  int bins = 256;
  bool log = false;
};

int run_gen(const GenArgs& g) {
  if (g.kind == "tangle-sphere") {
    const BivariateField truth = tangle_sphere_ground_truth(g.res);
    const auto r = attribute_ranges(truth);
    const EnsembleField ens =
        make_noisy_ensemble(truth, g.members, default_bimodal_spec(r[0], r[1]), g.seed, {"sphere", "tangle"}, g.threads);
    const fs::path meta = save_ensemble(ens, g.out, "ensemble");
    const fs::path truth_meta = save_ensemble(to_ensemble(truth, {"sphere", "tangle"}), g.out, "truth");
    std::cout << "ensemble: " << meta.string() << "\ntruth: " << truth_meta.string() << "\n";
    return 0;
  }
  if (g.kind == "hixel") {
    if (g.input.empty()) throw UsageError("--kind hixel needs --input");
    const EnsembleField src = load_ensemble(g.input);
    const BivariateField f = src.member_count() == 1 ? member_field(src, 0) : mean_field(src);
    const EnsembleField ens = hixel_reduce(f, g.block);
    std::cout << "ensemble: " << save_ensemble(ens, g.out, "ensemble").string() << "\n";
    return 0;
  }
  throw UsageError("unknown --kind '" + g.kind + "' (expected tangle-sphere or hixel)");
}

int run_compute(const ComputeArgs& c) {
  NoiseModelConfig cfg;
  const bool mean_field_model = c.model.model == "mean-field";
  if (!mean_field_model) {
    try {
      cfg = make_model_config(c.model);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  const EnsembleField ens = load_ensemble(c.ensemble);
  const TraitPolygon trait = load_trait(c.trait);
  const auto start = std::chrono::steady_clock::now();
  VolumeStats stats;
  const ProbabilityVolume vol = mean_field_model
                                    ? mean_field_indicator(ens, trait)
                                    : compute_probability_volume(ens, cfg, trait, VolumeOptions{c.threads}, &stats);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_probability_volume(vol, c.out);
  std::cout << "wall_time_s: " << std::fixed << std::setprecision(3) << seconds << "\n";
  std::cout << "culled_vertices: " << stats.culled << "\n";
  return 0;
}

std::vector<double> parse_thresholds(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad threshold '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--thresholds is empty");
  return out;
}

std::string threshold_label(double t) {
  std::ostringstream s;
  s << t;
  return s.str();
}

int run_extract(const ExtractArgs& e) {
  if (e.mode == "crisp") {
    if (e.field.empty() || e.trait.empty()) throw UsageError("--mode crisp needs --field and --trait");
    const EnsembleField ens = load_ensemble(e.field);
    const BivariateField f = ens.member_count() == 1 ? member_field(ens, 0) : mean_field(ens);
    const TriangleMesh m = crisp_fiber_surface(f, load_trait(e.trait));
    save_obj(m, e.out);
    std::cout << "triangles: " << m.triangles.size() << "\n";
    return 0;
  }
  if (e.prob.empty()) throw UsageError("--mode " + e.mode + " needs --prob");
  if (e.mode == "most-probable") {
    const TriangleMesh m = most_probable_fiber_surface(load_probability_volume(e.prob));
    save_obj(m, e.out);
    std::cout << "triangles: " << m.triangles.size() << "\n";
    return 0;
  }
  if (e.mode == "segment") {
    const std::vector<double> ts = parse_thresholds(e.thresholds.empty() ? "0.6,0.75,0.9" : e.thresholds);
    for (double t : ts) {
      if (!(t > 0.0 && t < 1.0)) throw UsageError("threshold " + threshold_label(t) + " outside (0, 1)");
    }
    std::vector<double> sorted = ts;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const auto meshes = probabilistic_segmentation(load_probability_volume(e.prob), sorted);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const std::string path = e.out + threshold_label(sorted[i]) + ".obj";
      save_obj(meshes[i], path);
      std::cout << path << " triangles: " << meshes[i].triangles.size() << "\n";
    }
    return 0;
  }
  throw UsageError("unknown --mode '" + e.mode + "' (expected most-probable, segment or crisp)");
}

int run_error(const ErrorArgs& a) {
  const double err = interior_probability_error(load_probability_volume(a.a), load_probability_volume(a.b));
  std::cout << std::fixed << std::setprecision(6) << err << "\n";
  return 0;
}

int run_scatter(const ScatterArgs& s) {
  if (s.bins < 1) throw UsageError("--bins must be >= 1");
  const EnsembleField ens = load_ensemble(s.ensemble);
  const ScatterDensity d = scatter_density(mean_field(ens), s.bins);
  save_png(scatter_image(d, s.log), s.out);
  fs::path sidecar = s.out;
  sidecar.replace_extension(".json");
  const nlohmann::json meta{{"bins", d.bins},   {"log", s.log},   {"x_min", d.x_lo}, {"x_max", d.x_hi},
                            {"y_min", d.y_lo},  {"y_max", d.y_hi}, {"total", d.total()},
                            {"variables", ens.variable_names()}};
  std::ofstream(sidecar) << meta.dump(2) << "\n";
  if (!fs::exists(sidecar)) throw IoError("cannot write " + sidecar.string());
  std::cout << "image: " << s.out << "\nranges: " << sidecar.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiberuq: uncertain fiber surfaces for bivariate ensembles"};
  app.require_subcommand(1, 1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic or hixel-reduced ensemble");
  gen_cmd->add_option("--kind", gen.kind, "tangle-sphere or hixel")->required();
  gen_cmd->add_option("--res", gen.res, "grid resolution per axis")->check(CLI::Range(2, 4096));
  gen_cmd->add_option("--members", gen.members, "ensemble members")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "noise seed");
  gen_cmd->add_option("--input", gen.input, "single-member field metadata (hixel)");
  gen_cmd->add_option("--block", gen.block, "hixel block size")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--threads", gen.threads, "worker threads (0 = all cores)");

  ComputeArgs comp;
  std::string base;
  auto* comp_cmd = app.add_subcommand("compute", "compute an interior probability volume");
  comp_cmd->add_option("--ensemble", comp.ensemble, "ensemble metadata")->required();
  comp_cmd->add_option("--trait", comp.trait, "trait polygon JSON")->required();
  comp_cmd->add_option("--model", comp.model.model,
                       "parametric-K, kde-K, histogram, histogram2d, bkde, monte-carlo or mean-field")
      ->required();
  comp_cmd->add_option("--out", comp.out, "output volume metadata")->required();
  comp_cmd->add_option("--bins", comp.model.bins, "histogram bins");
  comp_cmd->add_option("--resolution", comp.model.resolution, "bkde integration grid");
  comp_cmd->add_flag("--renormalize", comp.model.renormalize, "bkde: divide by total grid mass");
  comp_cmd->add_option("--samples", comp.model.samples, "monte-carlo draws per vertex");
  comp_cmd->add_option("--seed", comp.model.seed, "monte-carlo seed");
  auto* base_opt = comp_cmd->add_option("--base", base, "monte-carlo base model");
  comp_cmd->add_option("--threads", comp.threads, "worker threads (0 = all cores)");

  ExtractArgs ext;
  auto* ext_cmd = app.add_subcommand("extract", "extract surfaces");
  ext_cmd->add_option("--mode", ext.mode, "most-probable, segment or crisp")->required();
  ext_cmd->add_option("--prob", ext.prob, "probability volume metadata");
  ext_cmd->add_option("--thresholds", ext.thresholds, "comma-separated thresholds (segment)");
  ext_cmd->add_option("--field", ext.field, "bivariate field metadata (crisp)");
  ext_cmd->add_option("--trait", ext.trait, "trait polygon JSON (crisp)");
  ext_cmd->add_option("--out", ext.out, "OBJ path, or file prefix for segment")->required();

  ErrorArgs err;
  auto* err_cmd = app.add_subcommand("error", "2-norm between two probability volumes");
  err_cmd->add_option("a", err.a, "first volume")->required();
  err_cmd->add_option("b", err.b, "second volume")->required();

  ScatterArgs sc;
  auto* sc_cmd = app.add_subcommand("scatter", "attribute density image of the mean field");
  sc_cmd->add_option("--ensemble", sc.ensemble, "ensemble metadata")->required();
  sc_cmd->add_option("--bins", sc.bins, "bins per axis");
  sc_cmd->add_flag("--log", sc.log, "log1p intensity");
  sc_cmd->add_option("--out", sc.out, "PNG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*comp_cmd) {
      if (*base_opt) comp.model.base = base;
      return run_compute(comp);
    }
    if (*ext_cmd) return run_extract(ext);
    if (*err_cmd) return run_error(err);
    if (*sc_cmd) return run_scatter(sc);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
