#pragma once

// On-disk formats.
//
// Ensemble: JSON metadata sidecar
//   {"dims": [D1, D2, D3], "origin": [..], "spacing": [..], "member_count": M,
//    "variables": ["a1", "a2"], "byte_order": "little",
//    "files": [[var0 member0, var0 member1, ...], [var1 member0, ...]]}
// plus one raw float32 file per (variable, member), x-fastest. Relative file
// paths resolve against the metadata file's directory.
//
// Probability volume: same grid keys, "kind": "probability",
// "dtype": "float64", "file": "<name>.raw".
//
// Trait: {"vertices": [[a1, a2], ...]}.
// Meshes: Wavefront OBJ, positions and faces only.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiberuq/error.hpp"
#include "fiberuq/field.hpp"
#include "fiberuq/geometry.hpp"

namespace fiberuq {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace detail {

template <class T>
T byteswap_value(T v) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  std::reverse(b.begin(), b.end());
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

template <class T>
std::vector<T> read_raw(const fs::path& path, std::size_t count, bool little_endian) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open raw file " + path.string());
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  const std::size_t expected = count * sizeof(T);
  if (ec || size != expected) {
    throw IoError("size mismatch for " + path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                  (ec ? std::string("unknown") : std::to_string(size)));
  }
  std::vector<T> out(count);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(expected));
  if (!in) throw IoError("short read from " + path.string());
  if (little_endian != (std::endian::native == std::endian::little)) {
    for (T& v : out) v = byteswap_value(v);
  }
  return out;
}

template <class T>
void write_raw(const fs::path& path, std::span<const T> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (T v : values) {
      v = byteswap_value(v);
      out.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

inline json read_json_file(const fs::path& path) {
  if (path.empty()) throw IoError("empty path");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_json_file(const fs::path& path, const json& j) {
  if (path.empty()) throw IoError("empty path");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

inline UniformGrid3 grid_from_json(const json& j) {
  try {
    UniformGrid3 g;
    g.dims = j.at("dims").get<std::array<int, 3>>();
    g.origin = j.value("origin", std::array<double, 3>{0.0, 0.0, 0.0});
    g.spacing = j.value("spacing", std::array<double, 3>{1.0, 1.0, 1.0});
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad grid metadata: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("bad grid metadata: ") + e.what());
  }
}

inline void grid_to_json(const UniformGrid3& g, json& j) {
  j["dims"] = g.dims;
  j["origin"] = g.origin;
  j["spacing"] = g.spacing;
}

inline bool little_endian_flag(const json& j) {
  const std::string order = j.value("byte_order", std::string("little"));
  if (order == "little") return true;
  if (order == "big") return false;
  throw IoError("unknown byte_order '" + order + "'");
}

}  // namespace detail

inline EnsembleField load_ensemble(const fs::path& metadata_path) {
  const json meta = detail::read_json_file(metadata_path);
  const UniformGrid3 grid = detail::grid_from_json(meta);
  const bool little = detail::little_endian_flag(meta);
  int members = 0;
  std::array<std::string, 2> names{"a1", "a2"};
  std::vector<std::vector<std::string>> files;
  try {
    members = meta.at("member_count").get<int>();
    if (meta.contains("variables")) {
      const auto v = meta.at("variables").get<std::vector<std::string>>();
      if (v.size() != 2) throw IoError("ensemble must have exactly 2 variables");
      names = {v[0], v[1]};
    }
    files = meta.at("files").get<std::vector<std::vector<std::string>>>();
  } catch (const json::exception& e) {
    throw IoError("bad ensemble metadata " + metadata_path.string() + ": " + e.what());
  }
  if (members < 1) throw IoError("member_count must be >= 1");
  if (files.size() != 2) throw IoError("ensemble metadata must list files for exactly 2 variables");
  const fs::path base = metadata_path.parent_path();
  const std::size_t n = grid.vertex_count();
  std::vector<float> values;
  values.reserve(2 * n * members);
  for (int var = 0; var < 2; ++var) {
    if (files[var].size() != static_cast<std::size_t>(members)) {
      throw IoError("variable " + std::to_string(var) + " lists " + std::to_string(files[var].size()) +
                    " files, expected " + std::to_string(members));
    }
    for (int m = 0; m < members; ++m) {
      const fs::path p = fs::path(files[var][m]).is_absolute() ? fs::path(files[var][m]) : base / files[var][m];
      const auto slab = detail::read_raw<float>(p, n, little);
      for (std::size_t v = 0; v < n; ++v) {
        if (!std::isfinite(slab[v])) {
          throw IoError("non-finite value in " + p.string() + " at " + describe_vertex(grid, v));
        }
      }
      values.insert(values.end(), slab.begin(), slab.end());
    }
  }
  return EnsembleField(grid, members, names, std::move(values));
}

// Writes <dir>/<stem>.json and one raw file per (variable, member).
inline fs::path save_ensemble(const EnsembleField& ens, const fs::path& dir, const std::string& stem = "ensemble") {
  if (dir.empty()) throw IoError("empty output directory");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  json meta;
  detail::grid_to_json(ens.grid(), meta);
  meta["member_count"] = ens.member_count();
  meta["variables"] = ens.variable_names();
  meta["byte_order"] = "little";
  json files = json::array();
  for (int var = 0; var < 2; ++var) {
    json list = json::array();
    for (int m = 0; m < ens.member_count(); ++m) {
      std::ostringstream name;
      name << stem << "_v" << var << "_m" << std::setw(4) << std::setfill('0') << m << ".raw";
      detail::write_raw<float>(dir / name.str(), ens.slab(var, m));
      list.push_back(name.str());
    }
    files.push_back(list);
  }
  meta["files"] = files;
  const fs::path meta_path = dir / (stem + ".json");
  detail::write_json_file(meta_path, meta);
  return meta_path;
}

inline fs::path raw_path_for(const fs::path& metadata_path) {
  fs::path raw = metadata_path;
  raw.replace_extension(".raw");
  return raw;
}

inline void save_probability_volume(const ProbabilityVolume& vol, const fs::path& path) {
  if (path.empty()) throw IoError("empty path");
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  json meta;
  detail::grid_to_json(vol.grid(), meta);
  meta["kind"] = "probability";
  meta["dtype"] = "float64";
  meta["byte_order"] = "little";
  meta["file"] = raw_path_for(path).filename().string();
  detail::write_raw<double>(raw_path_for(path), vol.values());
  detail::write_json_file(path, meta);
}

inline ProbabilityVolume load_probability_volume(const fs::path& path) {
  const json meta = detail::read_json_file(path);
  const UniformGrid3 grid = detail::grid_from_json(meta);
  if (meta.value("dtype", std::string("float64")) != "float64") throw IoError("probability volume must be float64");
  const std::string file = meta.value("file", raw_path_for(path).filename().string());
  const fs::path raw = fs::path(file).is_absolute() ? fs::path(file) : path.parent_path() / file;
  auto values = detail::read_raw<double>(raw, grid.vertex_count(), detail::little_endian_flag(meta));
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (!(values[v] >= 0.0 && values[v] <= 1.0)) {
      throw IoError("probability out of range [0, 1] at " + describe_vertex(grid, v) + " in " + raw.string());
    }
  }
  return ProbabilityVolume(grid, std::move(values));
}

inline TraitPolygon trait_from_json(const json& j) {
  Polygon pts;
  try {
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2) throw InvalidTrait("trait vertices must be [a1, a2] pairs");
      pts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
  } catch (const json::exception& e) {
    throw InvalidTrait(std::string("bad trait JSON: ") + e.what());
  }
  return TraitPolygon(std::move(pts));
}

inline json trait_to_json(const TraitPolygon& t) {
  json verts = json::array();
  for (const Vec2& p : t.vertices()) verts.push_back({p.x, p.y});
  return json{{"vertices", verts}};
}

inline TraitPolygon load_trait(const fs::path& path) { return trait_from_json(detail::read_json_file(path)); }

inline void save_trait(const TraitPolygon& t, const fs::path& path) { detail::write_json_file(path, trait_to_json(t)); }

inline void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline std::string to_obj(const TriangleMesh& mesh) {
  std::ostringstream s;
  write_obj(mesh, s);
  return s.str();
}

inline void save_obj(const TriangleMesh& mesh, const fs::path& path) {
  if (path.empty()) throw IoError("empty path");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_obj(mesh, out);
  if (!out) throw IoError("write failed for " + path.string());
}

inline TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream s(line);
    std::string tag;
    s >> tag;
    if (tag == "v") {
      std::array<double, 3> p{};
      s >> p[0] >> p[1] >> p[2];
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::array<std::uint32_t, 3> t{};
      s >> t[0] >> t[1] >> t[2];
      mesh.triangles.push_back({t[0] - 1, t[1] - 1, t[2] - 1});
    }
  }
  return mesh;
}

}  // namespace fiberuq
