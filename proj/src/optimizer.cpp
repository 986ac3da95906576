#include "critp/optimizer.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace critp {

void SolverConfig::validate() const {
  params.validate();
  nl.validate(params);
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::Config, what);
  };
  if (resolution < 1) fail("resolution must be at least 1");
  if (max_iters < 0) fail("max-iters must be nonnegative");
  if (!(grad_tol > 0.0)) fail("grad-tol must be positive");
  if (!(constraint_tol > 0.0)) fail("constraint-tol must be positive");
  if (!(step_init > 0.0)) fail("step_init must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) fail("armijo_c must lie in (0,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    fail("backtrack_factor must lie in (0,1)");
  }
}

// ---------------------------------------------------------------------------
// Preconditioner

struct LaplacePreconditioner::Impl {
  std::uint64_t mesh_id = 0;
  std::size_t num_vertices = 0;
  std::vector<int> interior_index;  // -1 on the boundary
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  Eigen::VectorXd gather(const GridFunction& f) const {
    Eigen::VectorXd x(stiffness.rows());
    for (std::size_t v = 0; v < num_vertices; ++v) {
      if (interior_index[v] >= 0) x[interior_index[v]] = f[v];
    }
    return x;
  }
};

LaplacePreconditioner::LaplacePreconditioner(const Mesh& mesh)
    : impl_(std::make_unique<Impl>()) {
  impl_->mesh_id = mesh.id();
  impl_->num_vertices = mesh.num_vertices();
  impl_->interior_index.assign(mesh.num_vertices(), -1);
  int count = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.is_boundary(v)) impl_->interior_index[v] = count++;
  }
  const int n = mesh.dimension();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    auto verts = mesh.simplex(s);
    for (int a = 0; a < mesh.vertices_per_simplex(); ++a) {
      const int ia = impl_->interior_index[verts[a]];
      if (ia < 0) continue;
      auto ga = mesh.shape_gradient(s, a);
      for (int b = 0; b < mesh.vertices_per_simplex(); ++b) {
        const int ib = impl_->interior_index[verts[b]];
        if (ib < 0) continue;
        auto gb = mesh.shape_gradient(s, b);
        double value = 0.0;
        for (int d = 0; d < n; ++d) value += ga[d] * gb[d];
        triplets.emplace_back(ia, ib, mesh.volume(s) * value);
      }
    }
  }
  impl_->stiffness.resize(count, count);
  impl_->stiffness.setFromTriplets(triplets.begin(), triplets.end());
  if (count > 0) {
    impl_->solver.compute(impl_->stiffness);
    if (impl_->solver.info() != Eigen::Success) {
      throw Error(ErrorKind::DegenerateInput, "Laplace factorization failed");
    }
  }
}

LaplacePreconditioner::~LaplacePreconditioner() = default;
LaplacePreconditioner::LaplacePreconditioner(LaplacePreconditioner&&) noexcept =
    default;
LaplacePreconditioner& LaplacePreconditioner::operator=(
    LaplacePreconditioner&&) noexcept = default;

GridFunction LaplacePreconditioner::apply(const GridFunction& residual) const {
  if (residual.mesh_id() != impl_->mesh_id) {
    throw Error(ErrorKind::Dimension, "residual does not live on this mesh");
  }
  GridFunction out = residual;
  for (double& x : out.values()) x = 0.0;
  if (impl_->stiffness.rows() == 0) return out;
  const Eigen::VectorXd sol = impl_->solver.solve(impl_->gather(residual));
  for (std::size_t v = 0; v < impl_->num_vertices; ++v) {
    if (impl_->interior_index[v] >= 0) out[v] = sol[impl_->interior_index[v]];
  }
  return out;
}

double LaplacePreconditioner::energy_norm(const GridFunction& v) const {
  if (impl_->stiffness.rows() == 0) return 0.0;
  const Eigen::VectorXd x = impl_->gather(v);
  return std::sqrt(std::max(0.0, x.dot(impl_->stiffness * x)));
}

double LaplacePreconditioner::dual_norm(const GridFunction& residual) const {
  const GridFunction g = apply(residual);
  return std::sqrt(std::max(0.0, dot(g, residual)));
}

// ---------------------------------------------------------------------------
// Initial points and retraction

namespace {

double cos2_bump(std::span<const double> x, std::span<const double> center,
                 std::span<const double> half_width) {
  double value = 1.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double offset = std::abs(x[d] - center[d]);
    if (offset >= half_width[d]) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * offset / half_width[d]);
    value *= c * c;
  }
  return value;
}

}  // namespace

GridFunction initial_bump(const Mesh& mesh, KIndex k, std::uint64_t seed) {
  const int n = mesh.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::array<double, 3> center{};
  std::array<double, 3> half{};
  if (k != KIndex::K3) {
    for (int d = 0; d < n; ++d) {
      center[d] = 0.5 + jitter(rng);
      half[d] = 0.35;
    }
    const double sign = k == KIndex::K1 ? 1.0 : -1.0;
    GridFunction u = interpolate(mesh, [&](std::span<const double> x) {
      return sign * cos2_bump(x, {center.data(), std::size_t(n)},
                              {half.data(), std::size_t(n)});
    });
    return apply_dirichlet(mesh, std::move(u));
  }

  // Positive bump on (0.05, 0.45) x ..., negative bump on (0.55, 0.95) x ...
  std::array<double, 3> other{};
  center[0] = 0.25;
  other[0] = 0.75;
  half[0] = 0.2;
  for (int d = 1; d < n; ++d) {
    center[d] = 0.5 + 0.5 * jitter(rng);
    other[d] = 0.5 + 0.5 * jitter(rng);
    half[d] = 0.35;
  }
  GridFunction u = interpolate(mesh, [&](std::span<const double> x) {
    const std::span<const double> hw(half.data(), n);
    return cos2_bump(x, {center.data(), std::size_t(n)}, hw) -
           cos2_bump(x, {other.data(), std::size_t(n)}, hw);
  });
  return apply_dirichlet(mesh, std::move(u));
}

GridFunction initial_point(const Mesh& mesh, const Nonlinearity& nl,
                           const RunParameters& params, KIndex k,
                           std::uint64_t seed) {
  if (k == KIndex::K3 && mesh.resolution() < 4) {
    throw Error(ErrorKind::Config,
                "two disjoint interior bumps need resolution >= 4");
  }
  const GridFunction bump = initial_bump(mesh, k, seed);
  switch (k) {
    case KIndex::K1:
      return scale_to_manifold(mesh, nl, params, bump, Part::Positive).t_lambda *
             bump;
    case KIndex::K2:
      return scale_to_manifold(mesh, nl, params, bump, Part::Negative).t_lambda *
             bump;
    case KIndex::K3: {
      auto [plus, minus] = plus_minus_parts(bump);
      return project_pair_to_M3(mesh, nl, params, plus, -minus).combined;
    }
  }
  throw Error(ErrorKind::Config, "unknown constraint set");
}

std::pair<double, double> relative_constraint_residuals(
    const Mesh& mesh, const Nonlinearity& nl, const RunParameters& params,
    const GridFunction& u, KIndex k) {
  auto relative = [&](Part part) {
    const double stiff = part_stiffness(mesh, params, u, part);
    const double phi = constraint_phi(mesh, nl, params, u, part);
    if (stiff == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(phi) / stiff;
  };
  double pos = 0.0;
  double neg = 0.0;
  if (k != KIndex::K2) pos = relative(Part::Positive);
  if (k != KIndex::K1) neg = relative(Part::Negative);
  return {pos, neg};
}

Retraction retract(const Mesh& mesh, const Nonlinearity& nl,
                   const RunParameters& params, const GridFunction& u,
                   KIndex k, double constraint_tol) {
  require_on_mesh(mesh, u);
  auto [plus, minus] = plus_minus_parts(u);
  const bool need_pos = k != KIndex::K2;
  const bool need_neg = k != KIndex::K1;
  auto empty = [](const GridFunction& f) { return max_abs(f) == 0.0; };
  if ((need_pos && empty(plus)) || (need_neg && empty(minus))) {
    throw Error(ErrorKind::LostSign,
                std::string("retraction onto ") + to_string(k) +
                    " lost a required sign part");
  }
  const GridFunction neg_profile = -minus;

  Retraction out{GridFunction(mesh)};
  std::optional<FiberingMap> map_pos;
  std::optional<FiberingMap> map_neg;
  if (need_pos) map_pos = fibering_map(mesh, nl, params, plus, Part::Positive);
  if (need_neg) {
    map_neg = fibering_map(mesh, nl, params, neg_profile, Part::Negative);
  }
  auto bracket = [&](const FiberingMap& map) {
    return fibering_bracket(map.A, nl.c3, params.lambda,
                            map.source.front().first, nl.q, params.p);
  };

  // Alternate between the two scalar equations. φ1 only sees the positive
  // part and φ2 only the negative part (their nodal supports are disjoint),
  // so each half step is solved on its own fibering map.
  for (int sweep = 1; sweep <= 50; ++sweep) {
    if (map_pos) {
      out.scale_pos = smallest_positive_root(*map_pos, bracket(*map_pos));
    }
    if (map_neg) {
      out.scale_neg = smallest_positive_root(*map_neg, bracket(*map_neg));
    }
    out.u = GridFunction(mesh);
    if (need_pos) out.u += out.scale_pos * plus;
    if (need_neg) out.u += out.scale_neg * neg_profile;
    out.sweeps = sweep;
    const auto [res_pos, res_neg] =
        relative_constraint_residuals(mesh, nl, params, out.u, k);
    if (res_pos <= constraint_tol && res_neg <= constraint_tol) return out;
  }
  throw Error(ErrorKind::NoRoot,
              "retraction did not meet the constraint tolerance in 50 sweeps");
}

// ---------------------------------------------------------------------------
// Descent

DescentResult descend(const Mesh& mesh, const SolverConfig& config, KIndex k,
                      const GridFunction& init) {
  config.validate();
  require_on_mesh(mesh, init);
  const auto& params = config.params;
  const auto& nl = config.nl;
  if (mesh.dimension() != params.dimension) {
    throw Error(ErrorKind::Config, "mesh dimension differs from parameters");
  }

  DescentResult result{init, {}};
  SolveReport& report = result.report;
  report.k = k;
  report.threshold = sobolev_threshold(params);

  auto record_residuals = [&](const GridFunction& u) {
    const auto [pos, neg] = relative_constraint_residuals(mesh, nl, params, u, k);
    report.constraint_residual_pos = pos;
    report.constraint_residual_neg = neg;
    report.max_iterate_constraint_residual =
        std::max({report.max_iterate_constraint_residual, pos, neg});
    return std::max(pos, neg);
  };
  if (!(record_residuals(init) <= config.constraint_tol)) {
    throw Error(ErrorKind::Precondition,
                std::string("initial point is not on ") + to_string(k));
  }

  const LaplacePreconditioner precond(mesh);
  GridFunction& u = result.u;
  double current = energy(mesh, nl, params, u);
  report.energy = current;
  report.energy_history.push_back(current);

  auto finish = [&] {
    report.energy = current;
    report.below_threshold = current < report.threshold;
  };

  for (;;) {
    const GridFunction residual = energy_residual(mesh, nl, params, u);
    const GridFunction gradient = precond.apply(residual);
    const GridFunction direction = tangent_project(mesh, nl, params, u, gradient, k);
    report.projected_residual = precond.energy_norm(direction);
    if (report.projected_residual <= config.grad_tol) {
      report.converged = true;
      break;
    }
    if (report.iterations >= config.max_iters) break;

    const double slope = dot(residual, direction);
    bool accepted = false;
    if (slope > 0.0) {
      double step = config.step_init;
      for (int backtrack = 0; backtrack < 60; ++backtrack, step *= config.backtrack_factor) {
        Retraction candidate{GridFunction(mesh)};
        try {
          candidate = retract(mesh, nl, params, u - step * direction, k,
                              config.constraint_tol);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::LostSign || e.kind() == ErrorKind::NoRoot) {
            continue;
          }
          throw;
        }
        const double trial = energy(mesh, nl, params, candidate.u);
        if (trial <= current - config.armijo_c * step * slope) {
          u = std::move(candidate.u);
          current = trial;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      finish();
      report.error = "line search failed after 60 backtracks";
      throw StagnationError(report.error, result);
    }
    ++report.iterations;
    report.energy_history.push_back(current);
    record_residuals(u);
  }
  record_residuals(u);
  finish();
  return result;
}

// ---------------------------------------------------------------------------
// Three solutions and the λ sweep

namespace {

double normalized_difference(const GridFunction& a, const GridFunction& b) {
  const double scale = std::max(std::sqrt(dot(a, a)), std::sqrt(dot(b, b)));
  if (scale == 0.0) return 0.0;
  const GridFunction diff = a - b;
  return std::sqrt(dot(diff, diff)) / scale;
}

}  // namespace

SolutionTriple solve_three(const Mesh& mesh, const SolverConfig& config) {
  config.validate();
  SolutionTriple triple{GridFunction(mesh), GridFunction(mesh), GridFunction(mesh),
                        {}, {}, {}, 0.0, false, {}};
  const std::array<KIndex, 3> sets{KIndex::K1, KIndex::K2, KIndex::K3};
  std::array<GridFunction*, 3> fields{&triple.u1, &triple.u2, &triple.u3};
  std::array<SolveReport*, 3> reports{&triple.r1, &triple.r2, &triple.r3};
  for (int i = 0; i < 3; ++i) {
    reports[i]->k = sets[i];
    try {
      const GridFunction init =
          initial_point(mesh, config.nl, config.params, sets[i], config.seed);
      DescentResult result = descend(mesh, config, sets[i], init);
      *fields[i] = std::move(result.u);
      *reports[i] = std::move(result.report);
    } catch (const StagnationError& e) {
      *fields[i] = e.partial().u;
      *reports[i] = e.partial().report;
    } catch (const Error& e) {
      reports[i]->error = e.what();
    }
    if (!reports[i]->error.empty()) {
      if (!triple.error.empty()) triple.error += "; ";
      triple.error += std::string(to_string(sets[i])) + ": " + reports[i]->error;
    }
  }
  triple.min_pairwise_difference =
      std::min({normalized_difference(triple.u1, triple.u2),
                normalized_difference(triple.u1, triple.u3),
                normalized_difference(triple.u2, triple.u3)});
  triple.distinct = triple.min_pairwise_difference >= 1e-6;
  return triple;
}

SolutionTriple solve_three(const SolverConfig& config) {
  config.validate();
  const Mesh mesh = build_mesh(config.params.dimension, config.resolution);
  return solve_three(mesh, config);
}

std::vector<SweepRow> lambda_sweep(const SolverConfig& config,
                                   const std::vector<double>& lambdas,
                                   bool solve) {
  if (lambdas.empty()) throw Error(ErrorKind::Config, "empty lambda list");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1]))) {
      throw Error(ErrorKind::Config,
                  "lambda list must be positive and increasing");
    }
  }
  const Mesh mesh = build_mesh(config.params.dimension, config.resolution);
  const GridFunction reference = initial_bump(mesh, KIndex::K1, config.seed);

  std::vector<SweepRow> rows;
  for (double lambda : lambdas) {
    SweepRow row;
    row.lambda = lambda;
    SolverConfig cfg = config;
    cfg.params.lambda = lambda;
    try {
      cfg.validate();
      const ScaleResult scale =
          scale_to_manifold(mesh, cfg.nl, cfg.params, reference, Part::Positive);
      row.t_lambda = scale.t_lambda;
      row.t1_bracket = scale.t1_bracket;
      if (solve) {
        const SolutionTriple triple = solve_three(mesh, cfg);
        const std::array<const SolveReport*, 3> reports{&triple.r1, &triple.r2,
                                                        &triple.r3};
        for (int i = 0; i < 3; ++i) {
          row.solved[i] = reports[i]->error.empty() && reports[i]->converged;
          row.energy[i] = reports[i]->energy;
          row.below_threshold[i] = reports[i]->below_threshold;
        }
        row.error = triple.error;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace critp
