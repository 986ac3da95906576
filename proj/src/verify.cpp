#include "critp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace critp {

bool CheckReport::passed() const {
  return std::all_of(measurements.begin(), measurements.end(),
                     [](const Measurement& m) { return m.ok(); });
}

void CheckReport::add(std::string measurement, double value, double tolerance,
                      Relation relation) {
  measurements.push_back({std::move(measurement), value, tolerance, relation});
}

namespace {

double most_negative(const GridFunction& u) {
  double worst = 0.0;
  for (double x : u.values()) worst = std::max(worst, -x);
  return worst;
}

double most_positive(const GridFunction& u) {
  double worst = 0.0;
  for (double x : u.values()) worst = std::max(worst, x);
  return worst;
}

}  // namespace

CheckReport check_membership(const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params, const GridFunction& u,
                             KIndex k, double tol) {
  require_on_mesh(mesh, u);
  CheckReport report{std::string("membership_") + to_string(k), {}};
  auto [plus, minus] = plus_minus_parts(u);
  if (k == KIndex::K1) report.add("sign_violation", most_negative(u), 0.0);
  if (k == KIndex::K2) report.add("sign_violation", most_positive(u), 0.0);

  auto residual = [&](Part part) {
    const double stiff = part_stiffness(mesh, params, u, part);
    if (stiff == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(constraint_phi(mesh, nl, params, u, part)) / stiff;
  };
  if (k != KIndex::K2) {
    report.add("integral_u_plus", integrate(mesh, plus.values()), 0.0,
               Relation::Above);
    report.add("residual_phi1", residual(Part::Positive), tol);
  }
  if (k != KIndex::K1) {
    report.add("integral_u_minus", integrate(mesh, minus.values()), 0.0,
               Relation::Above);
    report.add("residual_phi2", residual(Part::Negative), tol);
  }
  return report;
}

CheckReport check_energy_chain(const Mesh& mesh, const Nonlinearity& nl,
                               const RunParameters& params,
                               const GridFunction& u, KIndex k,
                               double identity_tol) {
  require_on_mesh(mesh, u);
  CheckReport report{std::string("energy_chain_") + to_string(k), {}};
  const double pstar = params.critical_exponent();
  double stiffness = 0.0;
  if (k != KIndex::K2) stiffness += part_stiffness(mesh, params, u, Part::Positive);
  if (k != KIndex::K1) stiffness += part_stiffness(mesh, params, u, Part::Negative);

  auto mass = mesh.lumped_mass();
  double source = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) source += mass[i] * nl.f(u[i]) * u[i];
  const double rhs =
      params.lambda * source + nodal_power_integral(mesh, pstar, u);
  const double identity = stiffness > 0.0
                              ? std::abs(stiffness - rhs) / stiffness
                              : std::numeric_limits<double>::infinity();
  report.add("identity_relative", identity, identity_tol);

  const double phi = energy(mesh, nl, params, u);
  report.add("energy", phi, 0.0, Relation::Above);
  const double bound =
      (1.0 / nl.k2 + 1.0 / params.p) * gradient_power_integral(mesh, params.p, u);
  // Reported as Φ - bound <= 0.
  report.add("energy_minus_upper_bound", phi - bound, 0.0);
  return report;
}

CheckReport check_sign_structure(const Mesh& mesh, const RunParameters& params,
                                 const GridFunction& u1, const GridFunction& u2,
                                 const GridFunction& u3) {
  require_on_mesh(mesh, u1);
  require_on_mesh(mesh, u2);
  require_on_mesh(mesh, u3);
  CheckReport report{"sign_structure", {}};
  const double p = params.p;
  auto grad_norm = [&](const GridFunction& f) {
    return std::pow(gradient_power_integral(mesh, p, f), 1.0 / p);
  };
  report.add("u1_negative_part", most_negative(u1), 0.0);
  report.add("u2_positive_part", most_positive(u2), 0.0);
  auto [plus, minus] = plus_minus_parts(u3);
  report.add("u3_grad_plus_norm", grad_norm(plus), 0.0, Relation::Above);
  report.add("u3_grad_minus_norm", grad_norm(minus), 0.0, Relation::Above);
  report.add("u1_grad_norm", grad_norm(u1), 0.0, Relation::Above);
  report.add("u2_grad_norm", grad_norm(u2), 0.0, Relation::Above);
  report.add("u3_grad_norm", grad_norm(u3), 0.0, Relation::Above);
  return report;
}

CheckReport check_euler_lagrange(const Mesh& mesh, const Nonlinearity& nl,
                                 const RunParameters& params,
                                 const GridFunction& u, double tol) {
  require_on_mesh(mesh, u);
  CheckReport report{"euler_lagrange", {}};
  const LaplacePreconditioner precond(mesh);
  const GridFunction residual = energy_residual(mesh, nl, params, u);
  report.add("residual_dual_norm", precond.dual_norm(residual), tol);
  report.add("grad_norm",
             std::pow(gradient_power_integral(mesh, params.p, u), 1.0 / params.p),
             0.0, Relation::Above);
  return report;
}

std::vector<CheckReport> verify_fields(const Mesh& mesh, const Nonlinearity& nl,
                                       const RunParameters& params,
                                       const std::vector<GridFunction>& fields,
                                       const VerifyTolerances& tol) {
  std::vector<CheckReport> out;
  const KIndex sets[3] = {KIndex::K1, KIndex::K2, KIndex::K3};
  for (std::size_t i = 0; i < fields.size() && i < 3; ++i) {
    const std::string suffix = "_u" + std::to_string(i + 1);
    CheckReport member =
        check_membership(mesh, nl, params, fields[i], sets[i], tol.constraint);
    member.name += suffix;
    out.push_back(std::move(member));
    CheckReport chain = check_energy_chain(mesh, nl, params, fields[i], sets[i],
                                           tol.identity);
    chain.name += suffix;
    out.push_back(std::move(chain));
    CheckReport el =
        check_euler_lagrange(mesh, nl, params, fields[i], tol.euler_lagrange);
    el.name += suffix;
    out.push_back(std::move(el));
  }
  if (fields.size() == 3) {
    out.push_back(
        check_sign_structure(mesh, params, fields[0], fields[1], fields[2]));
  }
  return out;
}

}  // namespace critp
