#pragma once

#include <string>
#include <utility>

#include "critp/mesh.hpp"

namespace critp {

/// Run-wide parameters of the critical p-Laplace problem
///   -Δ_p u = |u|^{p*-2} u + λ f(u),  u = 0 on the boundary.
struct RunParameters {
  double p = 2.0;
  int dimension = 3;
  double lambda = 1.0;
  /// Regularization of the gradient weight |∇u|^{p-2} in residuals.
  double eps = 1e-8;

  double critical_exponent() const { return dimension * p / (dimension - p); }
  void validate() const;
};

enum class Family {
  /// f(u) = |u|^{q-2}u + (u_+)^{r-1}
  PowerSumPosPart,
  /// f(u) = |u|^{q-2}u + |u|^{r-2}u
  PowerSumSigned,
};

Family parse_family(const std::string& name);
std::string to_string(Family family);

struct NonlinValue {
  double f = 0.0;
  double F = 0.0;    // antiderivative, F(0) = 0
  double f_u = 0.0;  // derivative in u
};

/// Autonomous source term together with the constants of its growth
/// sandwich
///   c3 |u|_q^q <= k2 ∫F <= ∫f u <= c1 ∫f_u u^2 <= c4 |u|_q^q.
struct Nonlinearity {
  Family family = Family::PowerSumSigned;
  double q = 4.0;
  double r = 4.0;
  double c1 = 1.0 / 3.0;
  double c3 = 1.0;
  double c4 = 2.0;
  double k2 = 4.0;

  /// Tightest constants valid for the family. c4 is +inf when r < q (the
  /// r-term cannot be bounded by |u|^q near zero).
  static Nonlinearity with_default_constants(Family family, double q, double r);

  NonlinValue eval(double u) const;
  double f(double u) const;

  /// Checks exponents against the run (p < r <= q < p*) and the recorded
  /// constants against what the family admits. Throws Error(Config).
  void validate(const RunParameters& params) const;
};

struct EnergyTerms {
  double gradient = 0.0;  // (1/p) ∫|∇u|^p
  double critical = 0.0;  // -(1/p*) ∫|u|^{p*}
  double source = 0.0;    // -λ ∫F(u)
  double total() const { return gradient + critical + source; }
};

/// |x|^e with 0^e = 0 for every e (including e <= 0).
double pow_abs(double x, double e);

EnergyTerms energy_terms(const Mesh& mesh, const Nonlinearity& nl,
                         const RunParameters& params, const GridFunction& u);

double energy(const Mesh& mesh, const Nonlinearity& nl,
              const RunParameters& params, const GridFunction& u);

/// Nodal first variation ⟨Φ'(u), basis_i⟩ with the ε-regularized gradient
/// weight (|∇u|^2 + ε^2)^{(p-2)/2}; boundary rows are zero.
GridFunction energy_residual(const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params,
                             const GridFunction& u);

/// Nodal positive and negative parts: u = first - second exactly.
std::pair<GridFunction, GridFunction> plus_minus_parts(const GridFunction& u);

/// ∫|∇u|^p with per-simplex gradients.
double gradient_power_integral(const Mesh& mesh, double p,
                               const GridFunction& u);
/// Nodal quadrature of |u|^e.
double nodal_power_integral(const Mesh& mesh, double e, const GridFunction& u);

/// Best constant in the Sobolev inequality on R^N,
/// S_p = inf ∫|∇φ|^p / (∫|φ|^{p*})^{p/p*}, from the Aubin-Talenti closed form.
double best_sobolev_constant(double p, int dimension);

/// (1/N) S_p^{N/p}: energy level below which Palais-Smale holds.
double sobolev_threshold(const RunParameters& params);

}  // namespace critp
