#pragma once

#include <string>
#include <vector>

#include "critp/functional.hpp"
#include "critp/mesh.hpp"
#include "critp/nehari.hpp"
#include "critp/optimizer.hpp"

namespace critp {

enum class Relation { AtMost, Above };

struct Measurement {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::AtMost;

  bool ok() const {
    return relation == Relation::AtMost ? value <= tolerance : value > tolerance;
  }
};

struct CheckReport {
  std::string name;
  std::vector<Measurement> measurements;

  bool passed() const;
  void add(std::string measurement, double value, double tolerance,
           Relation relation = Relation::AtMost);
};

/// Sign condition, nontriviality of the required parts, and the relative
/// constraint residual |φ| / ∫|∇u_±|^p <= tol.
CheckReport check_membership(const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params, const GridFunction& u,
                             KIndex k, double tol);

/// For u in K_k:
///  (a) Σ_active ∫|∇u_±|^p = λ∫f(u)u + ∫|u|^{p*} to `identity_tol` relative,
///  (b) Φ(u) > 0,
///  (c) Φ(u) <= (1/k2 + 1/p) ∫|∇u|^p.
CheckReport check_energy_chain(const Mesh& mesh, const Nonlinearity& nl,
                               const RunParameters& params,
                               const GridFunction& u, KIndex k,
                               double identity_tol = 1e-9);

/// u1 >= 0, u2 <= 0, ‖∇(u3)_±‖_p > 0 and ‖∇u_i‖_p > 0 for all three.
CheckReport check_sign_structure(const Mesh& mesh, const RunParameters& params,
                                 const GridFunction& u1, const GridFunction& u2,
                                 const GridFunction& u3);

/// Dual norm sqrt(r^T K^{-1} r) of the energy residual against `tol`.
/// Also records ‖∇u‖_p so a trivial field is visible in the report.
CheckReport check_euler_lagrange(const Mesh& mesh, const Nonlinearity& nl,
                                 const RunParameters& params,
                                 const GridFunction& u, double tol);

struct VerifyTolerances {
  double constraint = 1e-10;
  double identity = 1e-9;
  double euler_lagrange = 1e-6;
};

/// Full battery for up to three fields; fields[i] is checked against K_{i+1}.
/// The sign-structure check runs only when all three are present.
std::vector<CheckReport> verify_fields(const Mesh& mesh, const Nonlinearity& nl,
                                       const RunParameters& params,
                                       const std::vector<GridFunction>& fields,
                                       const VerifyTolerances& tol);

}  // namespace critp
