#pragma once

// Builds a validated NoiseModelConfig from the loose options the CLI flags
// and the service's JSON bodies carry.

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fiberuq/distribution.hpp"
#include "fiberuq/error.hpp"

namespace fiberuq {

struct ModelOptions {
  std::string model;
  std::optional<int> bins;
  std::optional<int> resolution;
  bool renormalize = false;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> base;  // monte-carlo: the model to sample
};

inline NoiseModelConfig make_model_config(const ModelOptions& o) {
  const auto parsed = parse_model_name(o.model);
  if (!parsed) throw InvalidArgument("unknown model '" + o.model + "'");
  NoiseModelConfig cfg = *parsed;
  cfg.bins = o.bins.value_or(0);
  cfg.integration_resolution = o.resolution.value_or(0);
  cfg.renormalize = o.renormalize;
  cfg.sample_count = o.samples.value_or(0);
  cfg.seed = o.seed;
  if (cfg.kind == ModelKind::kMonteCarlo) {
    if (!o.base) throw InvalidArgument("monte-carlo needs a base model");
    const auto base = parse_model_name(*o.base);
    if (!base) throw InvalidArgument("unknown base model '" + *o.base + "'");
    cfg.base_kind = base->kind;
    cfg.kernel = base->kernel;
  }
  cfg.validate();
  return cfg;
}

// {"model": "...", "bins": B, "resolution": i, "renormalize": bool,
//  "samples": R, "seed": s, "base": "..."}
inline ModelOptions model_options_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("model config must be a JSON object");
  ModelOptions o;
  try {
    o.model = j.at("model").get<std::string>();
    if (j.contains("bins")) o.bins = j.at("bins").get<int>();
    if (j.contains("resolution")) o.resolution = j.at("resolution").get<int>();
    if (j.contains("renormalize")) o.renormalize = j.at("renormalize").get<bool>();
    if (j.contains("samples")) o.samples = j.at("samples").get<std::int64_t>();
    if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("base")) o.base = j.at("base").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad model config: ") + e.what());
  }
  return o;
}

}  // namespace fiberuq
