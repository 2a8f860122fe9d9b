#pragma once

// Marching cubes over uniform grids, and the surfaces built on it: the most
// probable fiber surface (probability isosurface at 0.5), probabilistic
// segmentation (isosurfaces at several thresholds) and crisp fiber surfaces
// of deterministic bivariate fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "fiberuq/error.hpp"
#include "fiberuq/field.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/marching_cubes_tables.hpp"

namespace fiberuq {

// Per-vertex sign: positive (interior) iff value >= threshold.
struct SignField {
  UniformGrid3 grid;
  std::vector<std::uint8_t> positive;

  std::size_t count_positive() const {
    std::size_t n = 0;
    for (auto s : positive) n += s;
    return n;
  }
};

inline SignField classify_vertices(const ProbabilityVolume& vol, double threshold = 0.5) {
  SignField s{vol.grid(), std::vector<std::uint8_t>(vol.size())};
  for (std::size_t v = 0; v < vol.size(); ++v) s.positive[v] = vol[v] >= threshold ? 1 : 0;
  return s;
}

namespace detail {

inline void require_cells(const UniformGrid3& g) {
  for (int a = 0; a < 3; ++a) {
    if (g.dims[a] < 2) throw InvalidArgument("isosurface extraction needs at least 2 vertices per axis");
  }
}

template <class Negative>
std::vector<std::uint8_t> cell_cases_impl(const UniformGrid3& g, Negative&& negative) {
  require_cells(g);
  const int cx = g.dims[0] - 1, cy = g.dims[1] - 1, cz = g.dims[2] - 1;
  std::vector<std::uint8_t> cases(static_cast<std::size_t>(cx) * cy * cz);
  std::size_t c = 0;
  for (int k = 0; k < cz; ++k) {
    for (int j = 0; j < cy; ++j) {
      for (int i = 0; i < cx; ++i, ++c) {
        std::uint8_t idx = 0;
        for (int corner = 0; corner < 8; ++corner) {
          const auto& o = mc::kCorners[corner];
          if (negative(g.index(i + o[0], j + o[1], k + o[2]))) idx |= static_cast<std::uint8_t>(1u << corner);
        }
        cases[c] = idx;
      }
    }
  }
  return cases;
}

}  // namespace detail

// Marching cubes case of every cell (x-fastest cell order). A corner is
// "below" when its value is < iso; values equal to iso sit on the interior side.
inline std::vector<std::uint8_t> cell_cases(const ScalarVolume& field, double iso) {
  return detail::cell_cases_impl(field.grid, [&](std::size_t v) { return field.values[v] < iso; });
}

inline std::vector<std::uint8_t> cell_cases(const SignField& signs) {
  return detail::cell_cases_impl(signs.grid, [&](std::size_t v) { return signs.positive[v] == 0; });
}

// Standard marching cubes with linear interpolation along cell edges, in
// world coordinates. Vertices on shared grid edges are shared; zero-area
// triangles are dropped. Output order follows the cell linear index.
inline TriangleMesh extract_isosurface(const ScalarVolume& field, double iso) {
  const UniformGrid3& g = field.grid;
  detail::require_cells(g);
  if (field.values.size() != g.vertex_count()) throw InvalidArgument("scalar field size does not match its grid");
  for (std::size_t v = 0; v < field.values.size(); ++v) {
    if (!std::isfinite(field.values[v])) throw InvalidArgument("non-finite field value at " + describe_vertex(g, v));
  }
  const std::vector<std::uint8_t> cases = cell_cases(field, iso);

  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
  auto vertex_on_edge = [&](int i, int j, int k, int edge) -> std::uint32_t {
    const auto& c0 = mc::kCorners[mc::kEdgeCorners[edge][0]];
    const auto& c1 = mc::kCorners[mc::kEdgeCorners[edge][1]];
    std::array<int, 3> a{i + c0[0], j + c0[1], k + c0[2]};
    std::array<int, 3> b{i + c1[0], j + c1[1], k + c1[2]};
    if (std::tie(a[2], a[1], a[0]) > std::tie(b[2], b[1], b[0])) std::swap(a, b);
    const int axis = (a[0] != b[0]) ? 0 : (a[1] != b[1]) ? 1 : 2;
    const std::size_t va = g.index(a[0], a[1], a[2]);
    const std::size_t vb = g.index(b[0], b[1], b[2]);
    const std::uint64_t key = static_cast<std::uint64_t>(va) * 3 + axis;
    if (auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;
    const double fa = field.values[va];
    const double fb = field.values[vb];
    const double t = (fb == fa) ? 0.5 : std::clamp((iso - fa) / (fb - fa), 0.0, 1.0);
    const auto pa = g.position(a[0], a[1], a[2]);
    const auto pb = g.position(b[0], b[1], b[2]);
    const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back({pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]), pa[2] + t * (pb[2] - pa[2])});
    edge_vertex.emplace(key, id);
    return id;
  };

  auto area2 = [&](const std::array<std::uint32_t, 3>& tri) {
    const auto& p = mesh.vertices[tri[0]];
    const auto& q = mesh.vertices[tri[1]];
    const auto& r = mesh.vertices[tri[2]];
    const std::array<double, 3> u{q[0] - p[0], q[1] - p[1], q[2] - p[2]};
    const std::array<double, 3> w{r[0] - p[0], r[1] - p[1], r[2] - p[2]};
    const double nx = u[1] * w[2] - u[2] * w[1];
    const double ny = u[2] * w[0] - u[0] * w[2];
    const double nz = u[0] * w[1] - u[1] * w[0];
    return nx * nx + ny * ny + nz * nz;
  };

  const int cx = g.dims[0] - 1, cy = g.dims[1] - 1, cz = g.dims[2] - 1;
  std::size_t c = 0;
  for (int k = 0; k < cz; ++k) {
    for (int j = 0; j < cy; ++j) {
      for (int i = 0; i < cx; ++i, ++c) {
        const auto& row = mc::kTriTable[cases[c]];
        for (int e = 0; e < 16 && row[e] >= 0; e += 3) {
          const std::array<std::uint32_t, 3> tri{vertex_on_edge(i, j, k, row[e]), vertex_on_edge(i, j, k, row[e + 1]),
                                                 vertex_on_edge(i, j, k, row[e + 2])};
          if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
          if (!(area2(tri) > 0.0)) continue;
          mesh.triangles.push_back(tri);
        }
      }
    }
  }
  return mesh;
}

// Isosurface of the probability field at 0.5: the surface whose cell
// topology is the majority (>= 0.5) vertex classification.
inline TriangleMesh most_probable_fiber_surface(const ProbabilityVolume& vol) {
  return extract_isosurface(vol.as_scalar(), 0.5);
}

// One isosurface per threshold; thresholds must be strictly increasing in (0, 1).
inline std::vector<TriangleMesh> probabilistic_segmentation(const ProbabilityVolume& vol,
                                                            std::span<const double> thresholds) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0)) {
      throw InvalidArgument("segmentation threshold " + std::to_string(thresholds[i]) + " outside (0, 1)");
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw InvalidArgument("segmentation thresholds must be strictly increasing");
    }
  }
  std::vector<TriangleMesh> meshes;
  meshes.reserve(thresholds.size());
  const ScalarVolume field = vol.as_scalar();
  for (double t : thresholds) meshes.push_back(extract_isosurface(field, t));
  return meshes;
}

// Distance to the trait boundary, negative inside (boundary counts as inside).
inline double signed_distance_to_polygon(Vec2 p, const TraitPolygon& trait) {
  const double d = boundary_distance(p, trait.span());
  return point_in_polygon(p, trait) ? -d : d;
}

// Interior indicator field used for the crisp surface: the negated signed
// distance, so interior vertices are >= 0.
inline ScalarVolume interior_distance_field(const BivariateField& field, const TraitPolygon& trait) {
  ScalarVolume out{field.grid, std::vector<double>(field.a1.size())};
  for (std::size_t v = 0; v < field.a1.size(); ++v) {
    out.values[v] = -signed_distance_to_polygon({field.a1[v], field.a2[v]}, trait);
  }
  return out;
}

// Fiber surface of a deterministic bivariate field: marching cubes on the
// attribute-space signed distance at 0. Vertex classification is exactly the
// point-in-polygon test.
inline TriangleMesh crisp_fiber_surface(const BivariateField& field, const TraitPolygon& trait) {
  return extract_isosurface(interior_distance_field(field, trait), 0.0);
}

}  // namespace fiberuq
