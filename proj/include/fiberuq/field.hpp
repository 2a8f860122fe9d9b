#pragma once

// Grids, bivariate ensembles, probability volumes and triangle meshes.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fiberuq/error.hpp"

namespace fiberuq {

// Uniform 3D grid; vertex (i, j, k) has linear index i + D1 * (j + D2 * k).
struct UniformGrid3 {
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
  }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }

  std::array<int, 3> coords(std::size_t index) const {
    const auto d0 = static_cast<std::size_t>(dims[0]);
    const auto d1 = static_cast<std::size_t>(dims[1]);
    return {static_cast<int>(index % d0), static_cast<int>((index / d0) % d1), static_cast<int>(index / (d0 * d1))};
  }

  std::array<double, 3> position(int i, int j, int k) const {
    return {origin[0] + spacing[0] * i, origin[1] + spacing[1] * j, origin[2] + spacing[2] * k};
  }

  void validate() const {
    for (int a = 0; a < 3; ++a) {
      if (dims[a] < 1) throw InvalidArgument("grid dims must be positive");
      if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) throw InvalidArgument("grid spacing must be positive");
      if (!std::isfinite(origin[a])) throw InvalidArgument("grid origin must be finite");
    }
  }

  friend bool operator==(const UniformGrid3&, const UniformGrid3&) = default;
};

inline std::string describe_vertex(const UniformGrid3& g, std::size_t index) {
  const auto c = g.coords(index);
  return "vertex " + std::to_string(index) + " (" + std::to_string(c[0]) + ", " + std::to_string(c[1]) + ", " +
         std::to_string(c[2]) + ")";
}

// Bivariate ensemble: two variables, M members, one float per vertex each.
// Storage is [variable][member][vertex], matching the one-file-per-(variable,
// member) on-disk layout.
class EnsembleField {
 public:
  EnsembleField(UniformGrid3 grid, int member_count, std::array<std::string, 2> names, std::vector<float> values)
      : grid_(std::move(grid)), members_(member_count), names_(std::move(names)), values_(std::move(values)) {
    grid_.validate();
    if (members_ < 1) throw InvalidArgument("ensemble needs at least one member");
    const std::size_t n = grid_.vertex_count();
    if (values_.size() != 2 * static_cast<std::size_t>(members_) * n) {
      throw InvalidArgument("ensemble value count does not match dims * members * 2");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k])) {
        const std::size_t v = k % n;
        const std::size_t member = (k / n) % members_;
        const std::size_t var = k / (n * members_);
        throw InvalidArgument("non-finite value at " + describe_vertex(grid_, v) + ", variable " +
                              std::to_string(var) + ", member " + std::to_string(member));
      }
    }
  }

  const UniformGrid3& grid() const { return grid_; }
  int member_count() const { return members_; }
  const std::array<std::string, 2>& variable_names() const { return names_; }
  std::size_t vertex_count() const { return grid_.vertex_count(); }

  float value(int variable, int member, std::size_t vertex) const {
    return values_[(static_cast<std::size_t>(variable) * members_ + member) * vertex_count() + vertex];
  }

  // Contiguous slab of one (variable, member) pair.
  std::span<const float> slab(int variable, int member) const {
    const std::size_t n = vertex_count();
    return {values_.data() + (static_cast<std::size_t>(variable) * members_ + member) * n, n};
  }

  void gather(std::size_t vertex, int variable, std::span<double> out) const {
    for (int m = 0; m < members_; ++m) out[m] = value(variable, m, vertex);
  }

  const std::vector<float>& raw() const { return values_; }

 private:
  UniformGrid3 grid_;
  int members_;
  std::array<std::string, 2> names_;
  std::vector<float> values_;
};

// A deterministic bivariate field (one member, or the ensemble mean).
struct BivariateField {
  UniformGrid3 grid;
  std::vector<double> a1;
  std::vector<double> a2;
};

inline BivariateField member_field(const EnsembleField& ens, int member) {
  if (member < 0 || member >= ens.member_count()) throw InvalidArgument("member index out of range");
  BivariateField f{ens.grid(), {}, {}};
  const auto s1 = ens.slab(0, member);
  const auto s2 = ens.slab(1, member);
  f.a1.assign(s1.begin(), s1.end());
  f.a2.assign(s2.begin(), s2.end());
  return f;
}

inline BivariateField mean_field(const EnsembleField& ens) {
  const std::size_t n = ens.vertex_count();
  BivariateField f{ens.grid(), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int m = 0; m < ens.member_count(); ++m) {
    const auto s1 = ens.slab(0, m);
    const auto s2 = ens.slab(1, m);
    for (std::size_t v = 0; v < n; ++v) {
      f.a1[v] += s1[v];
      f.a2[v] += s2[v];
    }
  }
  const double inv = 1.0 / ens.member_count();
  for (std::size_t v = 0; v < n; ++v) {
    f.a1[v] *= inv;
    f.a2[v] *= inv;
  }
  return f;
}

inline EnsembleField to_ensemble(const BivariateField& f, std::array<std::string, 2> names = {"a1", "a2"}) {
  std::vector<float> values;
  values.reserve(f.a1.size() * 2);
  for (double v : f.a1) values.push_back(static_cast<float>(v));
  for (double v : f.a2) values.push_back(static_cast<float>(v));
  return EnsembleField(f.grid, 1, std::move(names), std::move(values));
}

// Per-vertex scalar field (isosurface input).
struct ScalarVolume {
  UniformGrid3 grid;
  std::vector<double> values;
};

// Per-vertex interior probability; every value in [0, 1].
class ProbabilityVolume {
 public:
  ProbabilityVolume(UniformGrid3 grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.vertex_count()) throw InvalidArgument("probability volume size does not match grid");
    for (std::size_t v = 0; v < values_.size(); ++v) {
      if (!(values_[v] >= 0.0 && values_[v] <= 1.0)) {
        throw InvalidArgument("probability " + std::to_string(values_[v]) + " outside [0, 1] at " +
                              describe_vertex(grid_, v));
      }
    }
  }

  const UniformGrid3& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t v) const { return values_[v]; }
  std::size_t size() const { return values_.size(); }

  ScalarVolume as_scalar() const { return {grid_, values_}; }

 private:
  UniformGrid3 grid_;
  std::vector<double> values_;
};

struct TriangleMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

}  // namespace fiberuq
