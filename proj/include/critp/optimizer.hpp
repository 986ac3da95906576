#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "critp/error.hpp"
#include "critp/functional.hpp"
#include "critp/mesh.hpp"
#include "critp/nehari.hpp"

namespace critp {

struct SolverConfig {
  RunParameters params;
  Nonlinearity nl;
  int resolution = 8;
  int max_iters = 5000;
  /// Stop when the H^1_0 norm of the projected Sobolev gradient drops below.
  double grad_tol = 1e-7;
  /// Relative constraint tolerance |φ| / ∫|∇u_±|^p.
  double constraint_tol = 1e-10;
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolveReport {
  KIndex k = KIndex::K1;
  int iterations = 0;
  bool converged = false;
  double energy = 0.0;
  /// Relative constraint residuals of the final iterate (0 when inactive).
  double constraint_residual_pos = 0.0;
  double constraint_residual_neg = 0.0;
  /// Largest relative constraint residual over all accepted iterates.
  double max_iterate_constraint_residual = 0.0;
  double projected_residual = 0.0;
  double threshold = 0.0;
  bool below_threshold = false;
  std::vector<double> energy_history;
  /// Empty on success.
  std::string error;
};

struct DescentResult {
  GridFunction u;
  SolveReport report;
};

/// Thrown by `descend` when the line search cannot make progress; carries the
/// last accepted iterate.
class StagnationError : public Error {
 public:
  StagnationError(const std::string& what, DescentResult partial)
      : Error(ErrorKind::Stagnation, what), partial_(std::move(partial)) {}
  const DescentResult& partial() const { return partial_; }

 private:
  DescentResult partial_;
};

/// Discrete Dirichlet Laplacian (P1 stiffness on interior vertices) with a
/// sparse LDLT factorization. Maps residual co-vectors to H^1_0 gradients.
class LaplacePreconditioner {
 public:
  explicit LaplacePreconditioner(const Mesh& mesh);
  ~LaplacePreconditioner();
  LaplacePreconditioner(LaplacePreconditioner&&) noexcept;
  LaplacePreconditioner& operator=(LaplacePreconditioner&&) noexcept;

  /// Solves K g = r on interior vertices; boundary entries of g are 0.
  GridFunction apply(const GridFunction& residual) const;
  /// sqrt(v^T K v), the discrete H^1_0 seminorm.
  double energy_norm(const GridFunction& v) const;
  /// sqrt(r^T K^{-1} r), the dual norm of a residual co-vector.
  double dual_norm(const GridFunction& residual) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Unscaled smooth bump profile(s) for the given set: nonnegative for K1,
/// nonpositive (the negated K1 bump) for K2, and a positive bump on x < 1/2
/// plus a negative bump on x > 1/2 for K3. The seed jitters the centers.
GridFunction initial_bump(const Mesh& mesh, KIndex k, std::uint64_t seed);

/// Bump scaled onto M_k. Throws Error(Config) when m < 4 for K3.
GridFunction initial_point(const Mesh& mesh, const Nonlinearity& nl,
                           const RunParameters& params, KIndex k,
                           std::uint64_t seed);

struct Retraction {
  GridFunction u;
  double scale_pos = 1.0;
  double scale_neg = 1.0;
  int sweeps = 0;
};

/// Returns u to K_k: clip to the sign of k (K1, K2) and rescale the sign
/// parts onto the constraints. Throws Error(LostSign) if a required part is
/// empty after clipping.
Retraction retract(const Mesh& mesh, const Nonlinearity& nl,
                   const RunParameters& params, const GridFunction& u,
                   KIndex k, double constraint_tol = 1e-10);

/// Relative constraint residuals (pos, neg) of u for set k; inactive parts
/// report 0.
std::pair<double, double> relative_constraint_residuals(
    const Mesh& mesh, const Nonlinearity& nl, const RunParameters& params,
    const GridFunction& u, KIndex k);

/// Preconditioned projected descent with Armijo backtracking along the
/// retraction. Throws StagnationError after 60 failed backtracks.
DescentResult descend(const Mesh& mesh, const SolverConfig& config, KIndex k,
                      const GridFunction& init);

struct SolutionTriple {
  GridFunction u1;
  GridFunction u2;
  GridFunction u3;
  SolveReport r1;
  SolveReport r2;
  SolveReport r3;
  /// Smallest pairwise normalized difference |a-b| / max(|a|,|b|).
  double min_pairwise_difference = 0.0;
  bool distinct = false;
  /// Empty unless some run failed.
  std::string error;
};

SolutionTriple solve_three(const Mesh& mesh, const SolverConfig& config);
SolutionTriple solve_three(const SolverConfig& config);

struct SweepRow {
  double lambda = 0.0;
  double t_lambda = 0.0;
  double t1_bracket = 0.0;
  double energy[3] = {0.0, 0.0, 0.0};
  bool below_threshold[3] = {false, false, false};
  bool solved[3] = {false, false, false};
  std::string error;
};

/// For each λ: fibering root of the reference K1 bump and the three
/// minimized energies. Per-row failures are recorded and the sweep continues.
/// With `solve` false only the fibering columns are filled.
std::vector<SweepRow> lambda_sweep(const SolverConfig& config,
                                   const std::vector<double>& lambdas,
                                   bool solve = true);

}  // namespace critp
