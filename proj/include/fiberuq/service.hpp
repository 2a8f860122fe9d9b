#pragma once

// HTTP API over datasets, probability jobs and persisted volumes.
//
//   POST /datasets                      {"metadata_path": ...} or multipart upload -> 201 {dataset_id}
//   GET  /datasets/{id}                 dataset summary
//   GET  /datasets/{id}/scatter         ?bins=&log=  -> PNG, ranges in X-Axis-Ranges
//   POST /datasets/{id}/probability     {"trait": {...}, "config": {...}} -> 202 {job_id}
//   GET  /jobs/{id}                     job record
//   GET  /volumes/{id}                  volume summary
//   GET  /volumes/{id}/slice            ?axis=&index=&min=&max= -> PNG
//   GET  /volumes/{id}/mesh             ?iso= -> OBJ
//
// Volumes are written to <data_dir>/volumes in the CLI's on-disk format.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fiberuq/image.hpp"
#include "fiberuq/io.hpp"
#include "fiberuq/model_config.hpp"
#include "fiberuq/surface.hpp"
#include "fiberuq/volume.hpp"

namespace fiberuq {

struct ServiceConfig {
  std::filesystem::path data_dir = "fiberuq-data";
  unsigned job_threads = 0;  // vertex parallelism per job; 0 = all cores
  std::size_t max_upload_bytes = std::size_t{1} << 30;
};

enum class JobState { kQueued, kRunning, kDone, kFailed };

inline std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "?";
}

struct JobRecord {
  std::string id;
  JobState state = JobState::kQueued;
  std::string dataset_id;
  nlohmann::json trait;
  nlohmann::json config;
  std::string volume_id;
  std::string error;
  double seconds = 0.0;
  std::size_t culled = 0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"job_id", id}, {"state", to_string(state)}, {"dataset_id", dataset_id},
                     {"trait", trait},  {"config", config}};
    if (state == JobState::kDone) {
      j["volume_id"] = volume_id;
      j["seconds"] = seconds;
      j["culled_vertices"] = culled;
    }
    if (state == JobState::kFailed) j["error"] = error;
    return j;
  }
};

class Service {
 public:
  explicit Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    std::filesystem::create_directories(cfg_.data_dir / "datasets");
    std::filesystem::create_directories(cfg_.data_dir / "volumes");
    // Continue numbering after anything a previous run left in the data dir.
    for (const char* sub : {"datasets", "volumes"}) {
      for (const auto& entry : std::filesystem::directory_iterator(cfg_.data_dir / sub)) {
        const std::string name = entry.path().stem().string();
        if (name.size() < 2) continue;
        try {
          std::size_t used = 0;
          const auto n = std::stoull(name.substr(1), &used);
          if (used == name.size() - 1 && n > counter_) counter_ = n;
        } catch (const std::exception&) {
        }
      }
    }
  }

  ~Service() { wait_for_jobs(); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Blocks until every submitted job has finished.
  void wait_for_jobs() {
    std::vector<std::thread> threads;
    {
      std::lock_guard lock(mutex_);
      threads.swap(workers_);
    }
    for (auto& t : threads) t.join();
  }

  void install(httplib::Server& server) {
    server.set_payload_max_length(cfg_.max_upload_bytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Expose-Headers", "X-Axis-Ranges"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server.Post("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { post_dataset(req, res); });
    });
    server.Get(R"(/datasets/([A-Za-z0-9-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { get_dataset(req.matches[1], res); });
    });
    server.Get(R"(/datasets/([A-Za-z0-9-]+)/scatter)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { get_scatter(req, req.matches[1], res); });
    });
    server.Post(R"(/datasets/([A-Za-z0-9-]+)/probability)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { post_probability(req, req.matches[1], res); });
                });
    server.Get(R"(/jobs/([A-Za-z0-9-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { get_job(req.matches[1], res); });
    });
    server.Get(R"(/volumes/([A-Za-z0-9-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { get_volume(req.matches[1], res); });
    });
    server.Get(R"(/volumes/([A-Za-z0-9-]+)/slice)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { get_slice(req, req.matches[1], res); });
    });
    server.Get(R"(/volumes/([A-Za-z0-9-]+)/mesh)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { get_mesh(req, req.matches[1], res); });
    });
  }

  std::filesystem::path volume_path(const std::string& id) const { return cfg_.data_dir / "volumes" / (id + ".json"); }

 private:
  struct HttpError : std::runtime_error {
    int status;
    HttpError(int s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  };

  struct Dataset {
    Dataset(std::string i, std::filesystem::path m, EnsembleField e)
        : id(std::move(i)), metadata(std::move(m)), ensemble(std::move(e)) {}
    std::string id;
    std::filesystem::path metadata;
    EnsembleField ensemble;
    std::mutex run;  // one running job per dataset
  };

  static void send_error(httplib::Response& res, int status, const std::string& msg) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", msg}}.dump(), "application/json");
  }

  template <class F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const HttpError& e) {
      send_error(res, e.status, e.what());
    } catch (const InvalidTrait& e) {
      send_error(res, 400, e.what());
    } catch (const InvalidArgument& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    try {
      return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      throw HttpError(400, std::string("request body is not valid JSON: ") + e.what());
    }
  }

  template <class T>
  static T query(const httplib::Request& req, const std::string& key, T fallback) {
    if (!req.has_param(key)) return fallback;
    const std::string v = req.get_param_value(key);
    try {
      std::size_t used = 0;
      T out{};
      if constexpr (std::is_same_v<T, int>) out = std::stoi(v, &used);
      else out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw HttpError(400, "bad value for '" + key + "': " + v);
    }
  }

  std::string next_id(const char* prefix) {
    return std::string(prefix) + std::to_string(++counter_);
  }

  std::shared_ptr<Dataset> dataset(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw HttpError(404, "unknown dataset '" + id + "'");
    return it->second;
  }

  std::shared_ptr<const ProbabilityVolume> volume(const std::string& id) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = volumes_.find(id); it != volumes_.end()) return it->second;
    }
    const auto path = volume_path(id);
    if (!std::filesystem::exists(path)) throw HttpError(404, "unknown volume '" + id + "'");
    auto vol = std::make_shared<const ProbabilityVolume>(load_probability_volume(path));
    std::lock_guard lock(mutex_);
    volumes_.emplace(id, vol);
    return vol;
  }

  void post_dataset(const httplib::Request& req, httplib::Response& res) {
    std::filesystem::path metadata;
    std::string id;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("metadata")) throw HttpError(400, "multipart upload needs a 'metadata' part");
      id = next_id("d");
      const auto dir = cfg_.data_dir / "datasets" / id;
      std::filesystem::create_directories(dir);
      const auto meta_part = req.get_file_value("metadata");
      nlohmann::json meta;
      try {
        meta = nlohmann::json::parse(meta_part.content);
        for (const auto& var : meta.at("files")) {
          for (const auto& name : var) {
            const std::string file = name.get<std::string>();
            if (file.find('/') != std::string::npos || file.find("..") != std::string::npos) {
              throw HttpError(400, "uploaded file names must be plain names: " + file);
            }
            if (!req.has_file(file)) throw HttpError(400, "missing raw file part '" + file + "'");
            std::ofstream(dir / file, std::ios::binary) << req.get_file_value(file).content;
          }
        }
      } catch (const nlohmann::json::exception& e) {
        throw HttpError(400, std::string("bad metadata: ") + e.what());
      }
      metadata = dir / "ensemble.json";
      std::ofstream(metadata) << meta.dump(2);
    } else {
      const nlohmann::json body = parse_body(req);
      if (!body.is_object() || !body.contains("metadata_path") || !body["metadata_path"].is_string()) {
        throw HttpError(400, "expected {\"metadata_path\": \"...\"} or a multipart upload");
      }
      metadata = body["metadata_path"].get<std::string>();
      id = next_id("d");
    }
    auto ds = std::make_shared<Dataset>(id, metadata, load_checked(metadata));
    {
      std::lock_guard lock(mutex_);
      datasets_.emplace(id, ds);
    }
    res.status = 201;
    res.set_content(dataset_summary(*ds).dump(), "application/json");
  }

  static EnsembleField load_checked(const std::filesystem::path& metadata) {
    try {
      return load_ensemble(metadata);
    } catch (const Error& e) {
      throw HttpError(400, e.what());
    }
  }

  static nlohmann::json grid_json(const UniformGrid3& g) {
    return {{"dims", g.dims}, {"origin", g.origin}, {"spacing", g.spacing}};
  }

  static nlohmann::json dataset_summary(const Dataset& ds) {
    nlohmann::json j = grid_json(ds.ensemble.grid());
    j["dataset_id"] = ds.id;
    j["member_count"] = ds.ensemble.member_count();
    j["variables"] = ds.ensemble.variable_names();
    return j;
  }

  void get_dataset(const std::string& id, httplib::Response& res) {
    res.set_content(dataset_summary(*dataset(id)).dump(), "application/json");
  }

  void get_scatter(const httplib::Request& req, const std::string& id, httplib::Response& res) {
    const auto ds = dataset(id);
    const int bins = query<int>(req, "bins", 256);
    if (bins < 1 || bins > 4096) throw HttpError(400, "bins must be in [1, 4096]");
    const int log = query<int>(req, "log", 0);
    const ScatterDensity d = scatter_density(mean_field(ds->ensemble), bins);
    const auto png = encode_png(scatter_image(d, log != 0));
    const nlohmann::json ranges{{"x_min", d.x_lo}, {"x_max", d.x_hi}, {"y_min", d.y_lo}, {"y_max", d.y_hi}};
    res.set_header("X-Axis-Ranges", ranges.dump());
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  }

  void post_probability(const httplib::Request& req, const std::string& id, httplib::Response& res) {
    const auto ds = dataset(id);
    const nlohmann::json body = parse_body(req);
    if (!body.is_object() || !body.contains("trait") || !body.contains("config")) {
      throw HttpError(400, "expected {\"trait\": {...}, \"config\": {...}}");
    }
    const TraitPolygon trait = trait_from_json(body["trait"]);
    const NoiseModelConfig cfg = make_model_config(model_options_from_json(body["config"]));

    auto job = std::make_shared<JobRecord>();
    job->dataset_id = id;
    job->trait = trait_to_json(trait);
    job->config = body["config"];
    {
      std::lock_guard lock(mutex_);
      job->id = next_id("j");
      jobs_.emplace(job->id, job);
      workers_.emplace_back([this, ds, job, trait, cfg] { run_job(*ds, *job, trait, cfg); });
    }
    res.status = 202;
    res.set_content(nlohmann::json{{"job_id", job->id}}.dump(), "application/json");
  }

  void run_job(Dataset& ds, JobRecord& job, const TraitPolygon& trait, const NoiseModelConfig& cfg) {
    std::lock_guard run(ds.run);
    set_state(job, JobState::kRunning);
    try {
      VolumeStats stats;
      ProbabilityVolume vol = compute_probability_volume(ds.ensemble, cfg, trait, VolumeOptions{cfg_.job_threads}, &stats);
      const std::string vid = "v" + job.id.substr(1);
      save_probability_volume(vol, volume_path(vid));
      std::lock_guard lock(mutex_);
      volumes_.emplace(vid, std::make_shared<const ProbabilityVolume>(std::move(vol)));
      job.volume_id = vid;
      job.seconds = stats.seconds;
      job.culled = stats.culled;
      job.state = JobState::kDone;
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex_);
      job.error = e.what();
      if (job.error.empty()) job.error = "job failed";
      job.state = JobState::kFailed;
    }
  }

  void set_state(JobRecord& job, JobState s) {
    std::lock_guard lock(mutex_);
    job.state = s;
  }

  void get_job(const std::string& id, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw HttpError(404, "unknown job '" + id + "'");
    res.set_content(it->second->to_json().dump(), "application/json");
  }

  void get_volume(const std::string& id, httplib::Response& res) {
    const auto vol = volume(id);
    nlohmann::json j = grid_json(vol->grid());
    j["volume_id"] = id;
    res.set_content(j.dump(), "application/json");
  }

  void get_slice(const httplib::Request& req, const std::string& id, httplib::Response& res) {
    const auto vol = volume(id);
    const std::string axis_name = req.has_param("axis") ? req.get_param_value("axis") : "z";
    Axis axis;
    if (axis_name == "x") axis = Axis::kX;
    else if (axis_name == "y") axis = Axis::kY;
    else if (axis_name == "z") axis = Axis::kZ;
    else throw HttpError(400, "axis must be x, y or z");
    const int index = query<int>(req, "index", 0);
    const double lo = query<double>(req, "min", 0.0);
    const double hi = query<double>(req, "max", 1.0);
    const auto png = encode_png(volume_slice(*vol, axis, index, lo, hi));
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  }

  void get_mesh(const httplib::Request& req, const std::string& id, httplib::Response& res) {
    const auto vol = volume(id);
    const double iso = query<double>(req, "iso", 0.5);
    if (!(iso > 0.0 && iso < 1.0)) throw HttpError(400, "iso must be in (0, 1)");
    res.set_content(to_obj(extract_isosurface(vol->as_scalar(), iso)), "text/plain");
  }

  ServiceConfig cfg_;
  std::mutex mutex_;
  std::atomic<std::uint64_t> counter_{0};
  std::map<std::string, std::shared_ptr<Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<JobRecord>> jobs_;
  std::map<std::string, std::shared_ptr<const ProbabilityVolume>> volumes_;
  std::vector<std::thread> workers_;
};

}  // namespace fiberuq
