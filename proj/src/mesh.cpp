#include "critp/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>

#include "critp/error.hpp"

namespace critp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::DegenerateInput: return "degenerate input";
    case ErrorKind::Sign: return "sign error";
    case ErrorKind::NoRoot: return "no root";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::DegenerateConstraint: return "degenerate constraint";
    case ErrorKind::LostSign: return "lost sign";
    case ErrorKind::Stagnation: return "stagnation";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

}  // namespace

std::size_t Mesh::vertex_index(std::span<const int> ijk) const {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (int d = 0; d < dim_; ++d) {
    index += static_cast<std::size_t>(ijk[d]) * stride;
    stride *= static_cast<std::size_t>(res_ + 1);
  }
  return index;
}

Mesh build_mesh(int dimension, int resolution) {
  if (dimension != 2 && dimension != 3) {
    throw Error(ErrorKind::Config, "mesh dimension must be 2 or 3");
  }
  if (resolution < 1) {
    throw Error(ErrorKind::Config, "mesh resolution must be at least 1");
  }
  Mesh mesh;
  mesh.dim_ = dimension;
  mesh.res_ = resolution;
  mesh.id_ = next_mesh_id.fetch_add(1);

  const int n = dimension;
  const int side = resolution + 1;
  std::size_t nverts = 1;
  std::size_t ncells = 1;
  for (int d = 0; d < n; ++d) {
    nverts *= side;
    ncells *= resolution;
  }
  const double h = 1.0 / resolution;

  mesh.coords_.resize(nverts * n);
  mesh.boundary_.resize(nverts);
  std::array<int, 3> ijk{};
  for (std::size_t v = 0; v < nverts; ++v) {
    std::size_t rest = v;
    bool on_boundary = false;
    for (int d = 0; d < n; ++d) {
      ijk[d] = static_cast<int>(rest % side);
      rest /= side;
      mesh.coords_[v * n + d] = ijk[d] * h;
      on_boundary = on_boundary || ijk[d] == 0 || ijk[d] == resolution;
    }
    mesh.boundary_[v] = on_boundary ? 1 : 0;
  }

  // One simplex per axis permutation: walk from the cell origin adding unit
  // steps in permutation order.
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.begin() + n));

  const int nv = n + 1;
  mesh.simplices_.reserve(ncells * perms.size() * nv);
  for (std::size_t c = 0; c < ncells; ++c) {
    std::size_t rest = c;
    std::array<int, 3> origin{};
    for (int d = 0; d < n; ++d) {
      origin[d] = static_cast<int>(rest % resolution);
      rest /= resolution;
    }
    for (const auto& p : perms) {
      std::array<int, 3> corner = origin;
      mesh.simplices_.push_back(
          static_cast<int>(mesh.vertex_index({corner.data(), 3})));
      for (int step = 0; step < n; ++step) {
        corner[p[step]] += 1;
        mesh.simplices_.push_back(
            static_cast<int>(mesh.vertex_index({corner.data(), 3})));
      }
    }
  }

  const std::size_t nsimp = mesh.simplices_.size() / nv;
  mesh.volume_.resize(nsimp);
  mesh.shape_grads_.resize(nsimp * nv * n);
  mesh.lumped_mass_.assign(nverts, 0.0);
  double factorial = n == 2 ? 2.0 : 6.0;
  for (std::size_t s = 0; s < nsimp; ++s) {
    auto verts = mesh.simplex(s);
    Eigen::MatrixXd jac(n, n);
    auto x0 = mesh.coords(verts[0]);
    for (int a = 1; a < nv; ++a) {
      auto xa = mesh.coords(verts[a]);
      for (int d = 0; d < n; ++d) jac(d, a - 1) = xa[d] - x0[d];
    }
    mesh.volume_[s] = std::abs(jac.determinant()) / factorial;
    // Rows of J^{-1} are the gradients of barycentric coordinates 1..N.
    const Eigen::MatrixXd inv = jac.inverse();
    double* g = mesh.shape_grads_.data() + s * nv * n;
    for (int d = 0; d < n; ++d) g[d] = 0.0;
    for (int a = 1; a < nv; ++a) {
      for (int d = 0; d < n; ++d) {
        g[a * n + d] = inv(a - 1, d);
        g[d] -= inv(a - 1, d);
      }
    }
    for (int a = 0; a < nv; ++a) {
      mesh.lumped_mass_[verts[a]] += mesh.volume_[s] / nv;
    }
  }
  return mesh;
}

GridFunction::GridFunction(const Mesh& mesh)
    : mesh_id_(mesh.id()), values_(mesh.num_vertices(), 0.0) {}

GridFunction::GridFunction(const Mesh& mesh, std::vector<double> values)
    : mesh_id_(mesh.id()), values_(std::move(values)) {
  if (values_.size() != mesh.num_vertices()) {
    throw Error(ErrorKind::Dimension,
                "field has " + std::to_string(values_.size()) +
                    " values, mesh has " +
                    std::to_string(mesh.num_vertices()) + " vertices");
  }
}

namespace {

void require_same(const GridFunction& a, const GridFunction& b) {
  if (a.mesh_id() != b.mesh_id() || a.size() != b.size()) {
    throw Error(ErrorKind::Dimension, "fields live on different meshes");
  }
}

}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }
GridFunction operator-(GridFunction a) {
  for (double& x : a.values()) x = -x;
  return a;
}

double dot(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs(const GridFunction& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

void require_on_mesh(const Mesh& mesh, const GridFunction& u) {
  if (u.mesh_id() != mesh.id() || u.size() != mesh.num_vertices()) {
    throw Error(ErrorKind::Dimension, "field does not live on this mesh");
  }
}

double integrate(const Mesh& mesh, std::span<const double> vertex_values) {
  if (vertex_values.size() != mesh.num_vertices()) {
    throw Error(ErrorKind::Dimension,
                "integrand size does not match the vertex count");
  }
  const int nv = mesh.vertices_per_simplex();
  double total = 0.0;
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    double mean = 0.0;
    for (int v : mesh.simplex(s)) mean += vertex_values[v];
    total += mesh.volume(s) * mean / nv;
  }
  return total;
}

void simplex_gradient(const Mesh& mesh, std::span<const double> values,
                      std::size_t s, std::span<double> out) {
  const int n = mesh.dimension();
  auto verts = mesh.simplex(s);
  for (int d = 0; d < n; ++d) out[d] = 0.0;
  for (int a = 0; a < mesh.vertices_per_simplex(); ++a) {
    const double value = values[verts[a]];
    auto g = mesh.shape_gradient(s, a);
    for (int d = 0; d < n; ++d) out[d] += value * g[d];
  }
}

std::vector<double> gradient_table(const Mesh& mesh, const GridFunction& u) {
  require_on_mesh(mesh, u);
  const int n = mesh.dimension();
  std::vector<double> table(mesh.num_simplices() * n);
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    simplex_gradient(mesh, u.values(), s, {table.data() + s * n,
                                           static_cast<std::size_t>(n)});
  }
  return table;
}

GridFunction apply_dirichlet(const Mesh& mesh, GridFunction u) {
  require_on_mesh(mesh, u);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary(v)) u[v] = 0.0;
  }
  return u;
}

void write_mesh_dump(const Mesh& mesh, std::ostream& out) {
  const auto precision = out.precision(17);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    out << 'v';
    for (double x : mesh.coords(v)) out << ' ' << x;
    out << ' ' << (mesh.is_boundary(v) ? 1 : 0) << '\n';
  }
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    out << 's';
    for (int v : mesh.simplex(s)) out << ' ' << v;
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace critp
