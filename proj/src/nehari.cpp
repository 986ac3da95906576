#include "critp/nehari.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "critp/error.hpp"

namespace critp {

const char* to_string(KIndex k) {
  switch (k) {
    case KIndex::K1: return "K1";
    case KIndex::K2: return "K2";
    case KIndex::K3: return "K3";
  }
  return "K?";
}

double FiberingMap::operator()(double t) const {
  double value = A * std::pow(t, p) - B * std::pow(t, pstar);
  for (const auto& [c, e] : source) value -= lambda * c * std::pow(t, e);
  return value;
}

double fibering_bracket(double A, double c3, double lambda, double C, double q,
                        double p) {
  return std::pow(A / (c3 * lambda * C), 1.0 / (q - p));
}

double smallest_positive_root(const std::function<double(double)>& phi,
                              double t_start) {
  if (!(t_start > 0.0) || !std::isfinite(t_start)) {
    throw Error(ErrorKind::NoRoot, "fibering scan needs a positive start");
  }
  double hi = t_start;
  double f_hi = phi(hi);
  for (int doublings = 0; !(f_hi <= 0.0); ++doublings) {
    if (doublings == 60) {
      throw Error(ErrorKind::NoRoot,
                  "no sign change of the fibering map within 60 doublings");
    }
    hi *= 2.0;
    f_hi = phi(hi);
  }

  double lo = std::ldexp(hi, -64);
  if (!(phi(lo) > 0.0)) {
    throw Error(ErrorKind::NoRoot, "fibering map is not positive near t = 0");
  }
  // First sign change on the dyadic grid, scanning upward.
  for (;;) {
    const double next = std::min(2.0 * lo, hi);
    const double f_next = phi(next);
    if (f_next <= 0.0) {
      hi = next;
      f_hi = f_next;
      break;
    }
    lo = next;
  }
  if (f_hi == 0.0) return hi;

  double f_lo = phi(lo);
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = phi(mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
}

ScaleResult scale_on_coefficients(const FiberingCoefficients& coeffs,
                                  double p, double pstar, double q,
                                  double lambda, double c3) {
  FiberingMap map{p, pstar, coeffs.A, coeffs.B, lambda, {{coeffs.C, q}}};
  ScaleResult out;
  out.t1_bracket = fibering_bracket(coeffs.A, c3, lambda, coeffs.C, q, p);
  out.t_lambda = smallest_positive_root(map, out.t1_bracket);
  out.relative_residual =
      std::abs(map(out.t_lambda)) / (coeffs.A * std::pow(out.t_lambda, p));
  return out;
}

namespace {

struct PartView {
  GridFunction values;  // nonnegative magnitude of the part
  double sign;          // +1 for u+, -1 for u-
};

PartView select_part(const GridFunction& u, Part part) {
  auto [plus, minus] = plus_minus_parts(u);
  if (part == Part::Positive) return {std::move(plus), 1.0};
  return {std::move(minus), -1.0};
}

bool is_zero(const GridFunction& u) {
  for (double x : u.values()) {
    if (x != 0.0) return false;
  }
  return true;
}

double gradient_weight(double sq, double p) {
  if (p == 2.0) return 1.0;
  if (sq == 0.0) return 0.0;
  return std::pow(sq, 0.5 * (p - 2.0));
}

}  // namespace

double part_stiffness(const Mesh& mesh, const RunParameters& params,
                      const GridFunction& u, Part part) {
  return gradient_power_integral(mesh, params.p, select_part(u, part).values);
}

double constraint_phi(const Mesh& mesh, const Nonlinearity& nl,
                      const RunParameters& params, const GridFunction& u,
                      Part part) {
  require_on_mesh(mesh, u);
  const PartView view = select_part(u, part);
  const double pstar = params.critical_exponent();
  double value = gradient_power_integral(mesh, params.p, view.values);
  auto mass = mesh.lumped_mass();
  double crit = 0.0;
  double source = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = view.values[i];
    if (w == 0.0) continue;
    crit += mass[i] * pow_abs(w, pstar);
    source += mass[i] * nl.f(u[i]) * w;
  }
  // The sign of the source term follows the part: -λ∫f u+ and +λ∫f u-.
  return value - crit - view.sign * params.lambda * source;
}

FiberingCoefficients fibering_coefficients(const Mesh& mesh,
                                           const Nonlinearity& nl,
                                           const RunParameters& params,
                                           const GridFunction& w) {
  require_on_mesh(mesh, w);
  if (is_zero(w)) {
    throw Error(ErrorKind::DegenerateInput, "fibering profile is identically 0");
  }
  FiberingCoefficients c;
  c.A = gradient_power_integral(mesh, params.p, w);
  c.B = nodal_power_integral(mesh, params.critical_exponent(), w);
  c.C = nodal_power_integral(mesh, nl.q, w);
  return c;
}

FiberingMap fibering_map(const Mesh& mesh, const Nonlinearity& nl,
                         const RunParameters& params, const GridFunction& w,
                         Part part) {
  const double sign = part == Part::Positive ? 1.0 : -1.0;
  for (double x : w.values()) {
    if (sign * x < 0.0) {
      throw Error(ErrorKind::Sign,
                  part == Part::Positive
                      ? "profile for M1 must be nonnegative"
                      : "profile for M2 must be nonpositive");
    }
  }
  const FiberingCoefficients c = fibering_coefficients(mesh, nl, params, w);
  FiberingMap map{params.p, params.critical_exponent(), c.A, c.B,
                  params.lambda, {{c.C, nl.q}}};
  // The r-term of the pospart family is inactive on the negative part.
  if (nl.family == Family::PowerSumSigned || part == Part::Positive) {
    map.source.emplace_back(nodal_power_integral(mesh, nl.r, w), nl.r);
  }
  return map;
}

ScaleResult scale_to_manifold(const Mesh& mesh, const Nonlinearity& nl,
                              const RunParameters& params,
                              const GridFunction& w, Part part) {
  const FiberingMap map = fibering_map(mesh, nl, params, w, part);
  ScaleResult out;
  out.t1_bracket = fibering_bracket(map.A, nl.c3, params.lambda,
                                    map.source.front().first, nl.q, params.p);
  out.t_lambda = smallest_positive_root(map, out.t1_bracket);
  const GridFunction scaled = out.t_lambda * w;
  out.relative_residual =
      std::abs(constraint_phi(mesh, nl, params, scaled, part)) /
      part_stiffness(mesh, params, scaled, part);
  return out;
}

PairProjection project_pair_to_M3(const Mesh& mesh, const Nonlinearity& nl,
                                  const RunParameters& params,
                                  const GridFunction& w0,
                                  const GridFunction& w1) {
  require_on_mesh(mesh, w0);
  require_on_mesh(mesh, w1);
  for (std::size_t i = 0; i < w0.size(); ++i) {
    if (w0[i] * w1[i] != 0.0) {
      throw Error(ErrorKind::Precondition,
                  "pair profiles must have disjoint nodal supports");
    }
  }
  if (is_zero(w0) || is_zero(w1)) {
    throw Error(ErrorKind::DegenerateInput, "both pair profiles must be nonzero");
  }
  // Disjoint supports decouple φ1 and φ2: each depends on its own profile.
  const double t_pos =
      scale_to_manifold(mesh, nl, params, w0, Part::Positive).t_lambda;
  const double t_neg =
      scale_to_manifold(mesh, nl, params, w1, Part::Negative).t_lambda;
  return {t_pos, t_neg, t_pos * w0 + t_neg * w1};
}

GridFunction constraint_gradient(const Mesh& mesh, const Nonlinearity& nl,
                                 const RunParameters& params,
                                 const GridFunction& u, Part part) {
  require_on_mesh(mesh, u);
  const PartView view = select_part(u, part);
  const int n = mesh.dimension();
  const double p = params.p;
  const double pstar = params.critical_exponent();
  const double sign = view.sign;
  auto active = [&](std::size_t i) { return sign * u[i] > 0.0; };

  GridFunction grad(mesh);
  std::array<double, 3> g{};
  std::span<double> gs(g.data(), n);
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    simplex_gradient(mesh, view.values.values(), s, gs);
    double sq = 0.0;
    for (int d = 0; d < n; ++d) sq += g[d] * g[d];
    const double weight = gradient_weight(sq, p);
    if (weight == 0.0) continue;
    const double scale = p * mesh.volume(s) * weight;
    auto verts = mesh.simplex(s);
    for (int a = 0; a < mesh.vertices_per_simplex(); ++a) {
      if (!active(verts[a])) continue;
      auto sg = mesh.shape_gradient(s, a);
      double proj = 0.0;
      for (int d = 0; d < n; ++d) proj += g[d] * sg[d];
      // d(u-)[v] = -v on {u < 0}.
      grad[verts[a]] += sign * scale * proj;
    }
  }
  auto mass = mesh.lumped_mass();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mesh.is_boundary(i)) {
      grad[i] = 0.0;
      continue;
    }
    const double w = view.values[i];
    const NonlinValue fv = nl.eval(u[i]);
    double nodal = -params.lambda * sign * fv.f_u * w;
    if (active(i)) {
      nodal -= pstar * pow_abs(w, pstar - 1.0) * sign;
      nodal -= params.lambda * fv.f;
    }
    grad[i] += mass[i] * nodal;
  }
  return grad;
}

namespace {

double normal_coefficient(const GridFunction& grad, const GridFunction& normal,
                          const GridFunction& v) {
  const double den = dot(grad, normal);
  const double scale = std::sqrt(dot(grad, grad) * dot(normal, normal));
  if (!std::isfinite(den) || std::abs(den) <= 1e-14 * scale || den == 0.0) {
    throw Error(ErrorKind::DegenerateConstraint,
                "constraint gradient does not pair with the normal direction");
  }
  return dot(grad, v) / den;
}

}  // namespace

GridFunction tangent_project(const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params,
                             const GridFunction& u, const GridFunction& v,
                             KIndex k) {
  require_on_mesh(mesh, u);
  require_on_mesh(mesh, v);
  auto [plus, minus] = plus_minus_parts(u);
  GridFunction out = v;
  // ⟨∇φ1, u-⟩ = ⟨∇φ2, u+⟩ = 0, so the two K3 coefficients decouple.
  if (k == KIndex::K1 || k == KIndex::K3) {
    const GridFunction g1 = constraint_gradient(mesh, nl, params, u, Part::Positive);
    out -= normal_coefficient(g1, plus, v) * plus;
  }
  if (k == KIndex::K2 || k == KIndex::K3) {
    const GridFunction g2 = constraint_gradient(mesh, nl, params, u, Part::Negative);
    out -= normal_coefficient(g2, minus, v) * minus;
  }
  return out;
}

}  // namespace critp
