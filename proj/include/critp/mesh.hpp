#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace critp {

/// Uniform simplicial P1 discretization of the unit square (N = 2) or the
/// unit cube (N = 3). Each of the m^N cells is split into N! simplices along
/// its main diagonal (Kuhn subdivision), so every simplex shares the same
/// orientation pattern and the stiffness matrix is a standard M-matrix.
///
/// Immutable after construction.
class Mesh {
 public:
  int dimension() const { return dim_; }
  int resolution() const { return res_; }
  int vertices_per_simplex() const { return dim_ + 1; }
  std::size_t num_vertices() const { return boundary_.size(); }
  std::size_t num_simplices() const { return volume_.size(); }

  /// Identity shared by copies of the same mesh; fields carry it.
  std::uint64_t id() const { return id_; }

  std::span<const double> coords(std::size_t v) const {
    return {coords_.data() + v * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const int> simplex(std::size_t s) const {
    const std::size_t nv = vertices_per_simplex();
    return {simplices_.data() + s * nv, nv};
  }
  double volume(std::size_t s) const { return volume_[s]; }

  /// Constant gradient of the barycentric shape function of local vertex
  /// `local` on simplex `s`.
  std::span<const double> shape_gradient(std::size_t s, int local) const {
    const std::size_t nv = vertices_per_simplex();
    return {shape_grads_.data() + (s * nv + local) * dim_,
            static_cast<std::size_t>(dim_)};
  }

  bool is_boundary(std::size_t v) const { return boundary_[v] != 0; }

  /// Row sums of the P1 mass matrix: each simplex gives vol/(N+1) to each of
  /// its vertices. Nodal quadrature of g is sum_i mass_i * g_i.
  std::span<const double> lumped_mass() const { return lumped_mass_; }

  /// Flat index of the grid vertex with integer coordinates `ijk`.
  std::size_t vertex_index(std::span<const int> ijk) const;

  friend Mesh build_mesh(int dimension, int resolution);

 private:
  Mesh() = default;

  int dim_ = 0;
  int res_ = 0;
  std::uint64_t id_ = 0;
  std::vector<double> coords_;
  std::vector<int> simplices_;
  std::vector<double> volume_;
  std::vector<double> shape_grads_;
  std::vector<char> boundary_;
  std::vector<double> lumped_mass_;
};

/// Builds the mesh of (0,1)^N with `resolution` cells per side.
/// Throws Error(Config) unless N is 2 or 3. Resolution 1 is accepted (it
/// yields a mesh with no interior vertices); anything below 1 is rejected.
Mesh build_mesh(int dimension, int resolution);

/// Nodal real field on a mesh. Values at boundary vertices are expected to be
/// exactly zero; `apply_dirichlet` enforces that.
class GridFunction {
 public:
  explicit GridFunction(const Mesh& mesh);
  GridFunction(const Mesh& mesh, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::uint64_t mesh_id() const { return mesh_id_; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  std::uint64_t mesh_id_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);
GridFunction operator-(GridFunction a);

/// Euclidean inner product of nodal vectors (co-vector pairing).
double dot(const GridFunction& a, const GridFunction& b);
double max_abs(const GridFunction& a);

/// Throws Error(Dimension) if `u` was not built on `mesh`.
void require_on_mesh(const Mesh& mesh, const GridFunction& u);

/// Sum over simplices of volume times the mean of the vertex values.
double integrate(const Mesh& mesh, std::span<const double> vertex_values);

/// Per-simplex constant gradients, flattened as [simplex][component].
std::vector<double> gradient_table(const Mesh& mesh, const GridFunction& u);

/// Gradient of the P1 interpolant of `values` on simplex `s`, written to `out`
/// (length N).
void simplex_gradient(const Mesh& mesh, std::span<const double> values,
                      std::size_t s, std::span<double> out);

GridFunction apply_dirichlet(const Mesh& mesh, GridFunction u);

/// Nodal interpolant of `fn(x)`, boundary included; combine with
/// `apply_dirichlet` for admissible fields.
template <class Fn>
GridFunction interpolate(const Mesh& mesh, Fn&& fn) {
  GridFunction u(mesh);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    u[v] = fn(mesh.coords(v));
  }
  return u;
}

/// Debug dump: `v x y [z] flag` per vertex then `s i0 i1 i2 [i3]` per simplex.
void write_mesh_dump(const Mesh& mesh, std::ostream& out);

}  // namespace critp
