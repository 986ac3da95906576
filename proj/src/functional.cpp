#include "critp/functional.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "critp/error.hpp"

namespace critp {

namespace {

constexpr double kSlack = 1e-12;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::Config, what);
}

double norm_power(std::span<const double> g, double p) {
  double sq = 0.0;
  for (double x : g) sq += x * x;
  return p == 2.0 ? sq : std::pow(sq, 0.5 * p);
}

}  // namespace

void RunParameters::validate() const {
  if (dimension != 2 && dimension != 3) {
    config_error("dimension must be 2 or 3");
  }
  if (!(p > 1.0 && p < dimension)) {
    config_error("p must satisfy 1 < p < N");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    config_error("lambda must be positive");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    config_error("eps must be nonnegative");
  }
}

Family parse_family(const std::string& name) {
  if (name == "signed") return Family::PowerSumSigned;
  if (name == "pospart") return Family::PowerSumPosPart;
  config_error("unknown family '" + name + "' (expected signed|pospart)");
}

std::string to_string(Family family) {
  return family == Family::PowerSumSigned ? "signed" : "pospart";
}

double pow_abs(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), e);
}

Nonlinearity Nonlinearity::with_default_constants(Family family, double q,
                                                  double r) {
  Nonlinearity nl;
  nl.family = family;
  nl.q = q;
  nl.r = r;
  nl.k2 = r;
  nl.c3 = r / q;
  nl.c1 = 1.0 / (r - 1.0);
  nl.c4 = q == r ? 2.0 * nl.c1 * (q - 1.0)
                 : std::numeric_limits<double>::infinity();
  return nl;
}

double Nonlinearity::f(double u) const {
  double value = pow_abs(u, q - 2.0) * u;
  if (family == Family::PowerSumSigned) {
    value += pow_abs(u, r - 2.0) * u;
  } else if (u > 0.0) {
    value += std::pow(u, r - 1.0);
  }
  return value;
}

NonlinValue Nonlinearity::eval(double u) const {
  NonlinValue out;
  if (u == 0.0) {
    // f_u(0) is (e-1)|0|^{e-2}: 1 for e = 2, 0 for e > 2 and 0 by
    // convention for e < 2.
    if (q == 2.0) out.f_u += 1.0;
    if (r == 2.0 && family == Family::PowerSumSigned) out.f_u += 1.0;
    return out;
  }
  const double a = std::abs(u);
  out.f = std::pow(a, q - 2.0) * u;
  out.F = std::pow(a, q) / q;
  out.f_u = (q - 1.0) * std::pow(a, q - 2.0);
  if (family == Family::PowerSumSigned || u > 0.0) {
    out.f += std::pow(a, r - 2.0) * u;
    out.F += std::pow(a, r) / r;
    out.f_u += (r - 1.0) * std::pow(a, r - 2.0);
  }
  return out;
}

void Nonlinearity::validate(const RunParameters& params) const {
  const double p = params.p;
  const double pstar = params.critical_exponent();
  if (!std::isfinite(q) || !std::isfinite(r)) config_error("q, r must be finite");
  if (!(q > p && q < pstar)) {
    config_error("q must satisfy p < q < p* (p* = " + std::to_string(pstar) +
                 ")");
  }
  if (!(r > p && r <= q)) config_error("r must satisfy p < r <= q");
  if (!(c1 > 0.0 && c1 < 1.0 / (p - 1.0))) {
    config_error("c1 must lie in (0, 1/(p-1))");
  }
  if (!(k2 > p && k2 < pstar)) config_error("k2 must lie in (p, p*)");
  if (!(c3 > 0.0 && c3 < c4)) config_error("constants must satisfy 0 < c3 < c4");

  // What each family admits pointwise, with u -> 0 and u -> inf as the
  // binding limits.
  if (k2 > r * (1.0 + kSlack)) config_error("k2 exceeds r: k2*F <= f*u fails");
  if (c3 > k2 / q * (1.0 + kSlack)) config_error("c3 exceeds k2/q");
  if (c1 < 1.0 / (r - 1.0) * (1.0 - kSlack)) {
    config_error("c1 below 1/(r-1): f*u <= c1*f_u*u^2 fails");
  }
  if (q == r) {
    if (c4 < 2.0 * c1 * (q - 1.0) * (1.0 - kSlack)) {
      config_error("c4 below 2*c1*(q-1)");
    }
  } else if (!std::isinf(c4)) {
    config_error("no finite c4 exists when r < q");
  }
}

double gradient_power_integral(const Mesh& mesh, double p,
                               const GridFunction& u) {
  require_on_mesh(mesh, u);
  std::array<double, 3> g{};
  std::span<double> gs(g.data(), mesh.dimension());
  double total = 0.0;
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    simplex_gradient(mesh, u.values(), s, gs);
    total += mesh.volume(s) * norm_power(gs, p);
  }
  return total;
}

double nodal_power_integral(const Mesh& mesh, double e, const GridFunction& u) {
  require_on_mesh(mesh, u);
  auto mass = mesh.lumped_mass();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += mass[i] * pow_abs(u[i], e);
  return total;
}

EnergyTerms energy_terms(const Mesh& mesh, const Nonlinearity& nl,
                         const RunParameters& params, const GridFunction& u) {
  params.validate();
  nl.validate(params);
  const double p = params.p;
  const double pstar = params.critical_exponent();
  EnergyTerms terms;
  terms.gradient = gradient_power_integral(mesh, p, u) / p;
  auto mass = mesh.lumped_mass();
  double crit = 0.0;
  double source = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    crit += mass[i] * pow_abs(u[i], pstar);
    source += mass[i] * nl.eval(u[i]).F;
  }
  terms.critical = -crit / pstar;
  terms.source = -params.lambda * source;
  return terms;
}

double energy(const Mesh& mesh, const Nonlinearity& nl,
              const RunParameters& params, const GridFunction& u) {
  return energy_terms(mesh, nl, params, u).total();
}

GridFunction energy_residual(const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params,
                             const GridFunction& u) {
  params.validate();
  nl.validate(params);
  require_on_mesh(mesh, u);
  const int n = mesh.dimension();
  const double p = params.p;
  const double pstar = params.critical_exponent();
  const double eps2 = params.eps * params.eps;
  GridFunction res(mesh);
  std::array<double, 3> g{};
  std::span<double> gs(g.data(), n);
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    simplex_gradient(mesh, u.values(), s, gs);
    double sq = 0.0;
    for (int d = 0; d < n; ++d) sq += g[d] * g[d];
    double weight = 1.0;
    if (p != 2.0) {
      const double base = sq + eps2;
      if (base == 0.0) continue;  // zero gradient contributes nothing
      weight = std::pow(base, 0.5 * (p - 2.0));
    }
    const double scale = mesh.volume(s) * weight;
    auto verts = mesh.simplex(s);
    for (int a = 0; a < mesh.vertices_per_simplex(); ++a) {
      auto sg = mesh.shape_gradient(s, a);
      double proj = 0.0;
      for (int d = 0; d < n; ++d) proj += g[d] * sg[d];
      res[verts[a]] += scale * proj;
    }
  }
  auto mass = mesh.lumped_mass();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mesh.is_boundary(i)) {
      res[i] = 0.0;
      continue;
    }
    const double ui = u[i];
    res[i] -= mass[i] * (pow_abs(ui, pstar - 2.0) * ui + params.lambda * nl.f(ui));
  }
  return res;
}

std::pair<GridFunction, GridFunction> plus_minus_parts(const GridFunction& u) {
  GridFunction plus = u;
  GridFunction minus = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    plus[i] = u[i] > 0.0 ? u[i] : 0.0;
    minus[i] = u[i] < 0.0 ? -u[i] : 0.0;
  }
  return {std::move(plus), std::move(minus)};
}

double best_sobolev_constant(double p, int dimension) {
  const double n = dimension;
  if (!(p > 1.0 && p < n)) config_error("best Sobolev constant needs 1 < p < N");
  const double ratio = std::tgamma(1.0 + n / 2.0) * std::tgamma(n) /
                       (std::tgamma(n / p) * std::tgamma(1.0 + n - n / p));
  const double k = std::pow(std::numbers::pi, -0.5) * std::pow(n, -1.0 / p) *
                   std::pow((p - 1.0) / (n - p), 1.0 - 1.0 / p) *
                   std::pow(ratio, 1.0 / n);
  return std::pow(k, -p);
}

double sobolev_threshold(const RunParameters& params) {
  params.validate();
  const double s = best_sobolev_constant(params.p, params.dimension);
  return std::pow(s, params.dimension / params.p) / params.dimension;
}

}  // namespace critp
