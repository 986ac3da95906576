#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "critp/functional.hpp"
#include "critp/mesh.hpp"

namespace critp {

/// Sign-restricted constraint sets: K1 = {u in M1, u >= 0},
/// K2 = {u in M2, u <= 0}, K3 = M1 ∩ M2.
enum class KIndex { K1 = 1, K2 = 2, K3 = 3 };

/// Selects the constraint φ1 (positive part) or φ2 (negative part).
enum class Part { Positive = 1, Negative = 2 };

const char* to_string(KIndex k);

/// Integrals of a fixed profile w that drive its fibering map.
struct FiberingCoefficients {
  double A = 0.0;  // ∫|∇w|^p
  double B = 0.0;  // ∫|w|^{p*}
  double C = 0.0;  // ∫|w|^q
};

/// t -> A t^p - B t^{p*} - λ Σ_j c_j t^{e_j}: the constraint along the ray
/// t·w for a sign-definite profile w.
struct FiberingMap {
  double p = 2.0;
  double pstar = 6.0;
  double A = 0.0;
  double B = 0.0;
  double lambda = 1.0;
  std::vector<std::pair<double, double>> source;  // (c_j, e_j)

  double operator()(double t) const;
};

/// t1 = (A / (c3 λ C))^{1/(q-p)}: φ(t1 w) <= 0 whenever c3 is valid.
double fibering_bracket(double A, double c3, double lambda, double C, double q,
                        double p);

/// Smallest positive zero of `phi`, assuming phi > 0 near 0+. Starting at
/// `t_start` the upper end doubles (at most 60 times) until phi <= 0; then a
/// dyadic grid is scanned upward from 2^-64 times that end and the first sign
/// change is bisected to machine precision. Throws Error(NoRoot).
double smallest_positive_root(const std::function<double(double)>& phi,
                              double t_start);

struct ScaleResult {
  double t_lambda = 0.0;
  double t1_bracket = 0.0;
  /// |φ(t_lambda w)| / ∫|∇(t_lambda w)_±|^p, evaluated on the field.
  double relative_residual = 0.0;
};

/// Root of the fibering map built from synthetic coefficients: A t^p -
/// B t^{p*} - λ C t^q. The bracket uses `c3`.
ScaleResult scale_on_coefficients(const FiberingCoefficients& coeffs,
                                  double p, double pstar, double q,
                                  double lambda, double c3);

/// ∫|∇u_±|^p for the nodal part selected by `part`.
double part_stiffness(const Mesh& mesh, const RunParameters& params,
                      const GridFunction& u, Part part);

/// φ1(u) = ∫|∇u+|^p - ∫|u+|^{p*} - λ∫f(u) u+
/// φ2(u) = ∫|∇u-|^p - ∫|u-|^{p*} + λ∫f(u) u-
/// (φ2 is ⟨Φ'(u), -u-⟩ for u <= 0, which makes K2 the mirror of K1.)
double constraint_phi(const Mesh& mesh, const Nonlinearity& nl,
                      const RunParameters& params, const GridFunction& u,
                      Part part);

/// Throws Error(DegenerateInput) for w ≡ 0.
FiberingCoefficients fibering_coefficients(const Mesh& mesh,
                                           const Nonlinearity& nl,
                                           const RunParameters& params,
                                           const GridFunction& w);

/// Fibering map of φ_part along t·w; w must be >= 0 (Positive) or <= 0
/// (Negative).
FiberingMap fibering_map(const Mesh& mesh, const Nonlinearity& nl,
                         const RunParameters& params, const GridFunction& w,
                         Part part);

/// Smallest t > 0 with φ_part(t·w) = 0. Errors: w ≡ 0 (DegenerateInput), wrong
/// sign (Sign), no bracket (NoRoot).
ScaleResult scale_to_manifold(const Mesh& mesh, const Nonlinearity& nl,
                              const RunParameters& params,
                              const GridFunction& w, Part part);

struct PairProjection {
  double t_pos = 0.0;
  double t_neg = 0.0;
  GridFunction combined;
};

/// Scales w0 >= 0 and w1 <= 0 with disjoint nodal supports so that
/// t_pos w0 + t_neg w1 lies in M3.
PairProjection project_pair_to_M3(const Mesh& mesh, const Nonlinearity& nl,
                                  const RunParameters& params,
                                  const GridFunction& w0,
                                  const GridFunction& w1);

/// Nodal co-vector of the first variation of φ_part. The positive part is
/// differentiated with the a.e. convention: d(u+)[v] = v on {u > 0}, 0
/// elsewhere (likewise for u-).
GridFunction constraint_gradient(const Mesh& mesh, const Nonlinearity& nl,
                                 const RunParameters& params,
                                 const GridFunction& u, Part part);

/// Projection of v onto T_u M_k along span{u+} (K1), span{u-} (K2) or
/// span{u+, u-} (K3). Throws Error(DegenerateConstraint) if a normal pairing
/// vanishes.
GridFunction tangent_project(const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params,
                             const GridFunction& u, const GridFunction& v,
                             KIndex k);

}  // namespace critp
