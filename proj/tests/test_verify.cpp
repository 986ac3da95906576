#include <gtest/gtest.h>

#include <random>

#include "critp/verify.hpp"
#include "oracles.hpp"

using namespace critp;

namespace {

SolverConfig reference_config() {
  SolverConfig c;
  c.params = RunParameters{2.0, 3, 50.0, 1e-8};
  c.nl = Nonlinearity::with_default_constants(Family::PowerSumSigned, 4.0, 4.0);
  c.resolution = 8;
  return c;
}

const Mesh& mesh8() {
  static const Mesh mesh = build_mesh(3, 8);
  return mesh;
}

const SolutionTriple& reference_triple() {
  static const SolutionTriple t = solve_three(mesh8(), reference_config());
  return t;
}

const Measurement& find(const CheckReport& r, const std::string& name) {
  for (const Measurement& m : r.measurements) {
    if (m.name == name) return m;
  }
  throw std::runtime_error("no measurement " + name + " in " + r.name);
}

}  // namespace

TEST(CheckReport, PassedMeansAllWithinTolerance) {
  CheckReport r{"demo", {}};
  r.add("small", 1e-12, 1e-10);
  r.add("positive", 0.3, 0.0, Relation::Above);
  EXPECT_TRUE(r.passed());
  r.add("too_big", 1.0, 0.5);
  EXPECT_FALSE(r.passed());
  CheckReport zero{"zero", {}};
  zero.add("strict", 0.0, 0.0, Relation::Above);
  EXPECT_FALSE(zero.passed());
}

TEST(CheckMembership, Examples) {
  const SolverConfig c = reference_config();
  const GridFunction u = initial_point(mesh8(), c.nl, c.params, KIndex::K1, 0);
  EXPECT_TRUE(check_membership(mesh8(), c.nl, c.params, u, KIndex::K1, 1e-10).passed());

  const CheckReport zero = check_membership(mesh8(), c.nl, c.params, GridFunction(mesh8()), KIndex::K1, 1e-10);
  EXPECT_FALSE(zero.passed());
  EXPECT_FALSE(find(zero, "integral_u_plus").ok());

  const CheckReport off = check_membership(mesh8(), c.nl, c.params, 1.1 * u, KIndex::K1, 1e-10);
  EXPECT_FALSE(off.passed());
  EXPECT_FALSE(find(off, "residual_phi1").ok());
  EXPECT_TRUE(find(off, "sign_violation").ok());

  const CheckReport wrong_sign = check_membership(mesh8(), c.nl, c.params, u, KIndex::K2, 1e-10);
  EXPECT_FALSE(find(wrong_sign, "sign_violation").ok());
}

TEST(CheckEnergyChain, SolverOutputs) {
  const SolverConfig c = reference_config();
  const SolutionTriple& t = reference_triple();
  const CheckReport r1 = check_energy_chain(mesh8(), c.nl, c.params, t.u1, KIndex::K1);
  EXPECT_TRUE(r1.passed());
  EXPECT_LE(find(r1, "identity_relative").value, 1e-9);
  EXPECT_TRUE(check_energy_chain(mesh8(), c.nl, c.params, t.u2, KIndex::K2).passed());
  EXPECT_TRUE(check_energy_chain(mesh8(), c.nl, c.params, t.u3, KIndex::K3).passed());
}

TEST(CheckEnergyChain, SeedBattery) {
  SolverConfig c = reference_config();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    const SolutionTriple t = solve_three(mesh8(), c);
    ASSERT_TRUE(t.error.empty()) << "seed " << seed << ": " << t.error;
    const std::pair<const GridFunction*, KIndex> runs[] = {
        {&t.u1, KIndex::K1}, {&t.u2, KIndex::K2}, {&t.u3, KIndex::K3}};
    for (auto [u, k] : runs) {
      const CheckReport r = check_energy_chain(mesh8(), c.nl, c.params, *u, k);
      EXPECT_TRUE(find(r, "energy").ok()) << "seed " << seed << " " << to_string(k);
      EXPECT_TRUE(r.passed()) << "seed " << seed << " " << to_string(k);
    }
  }
}

TEST(CheckEnergyChain, IdentityFailsOffManifold) {
  const SolverConfig c = reference_config();
  const CheckReport r = check_energy_chain(mesh8(), c.nl, c.params, 1.1 * reference_triple().u1, KIndex::K1);
  EXPECT_FALSE(find(r, "identity_relative").ok());
}

TEST(CheckSignStructure, Examples) {
  const SolverConfig c = reference_config();
  const SolutionTriple& t = reference_triple();
  EXPECT_TRUE(check_sign_structure(mesh8(), c.params, t.u1, t.u2, t.u3).passed());
  const CheckReport no_minus = check_sign_structure(mesh8(), c.params, t.u1, t.u2, t.u1);
  EXPECT_FALSE(no_minus.passed());
  EXPECT_FALSE(find(no_minus, "u3_grad_minus_norm").ok());
  const CheckReport trivial = check_sign_structure(mesh8(), c.params, GridFunction(mesh8()), t.u2, t.u3);
  EXPECT_FALSE(trivial.passed());
  EXPECT_FALSE(find(trivial, "u1_grad_norm").ok());
  EXPECT_FALSE(check_sign_structure(mesh8(), c.params, t.u2, t.u1, t.u3).passed());
}

TEST(CheckEulerLagrange, Examples) {
  const SolverConfig c = reference_config();
  const SolutionTriple& t = reference_triple();
  for (const GridFunction* u : {&t.u1, &t.u2, &t.u3}) {
    EXPECT_TRUE(check_euler_lagrange(mesh8(), c.nl, c.params, *u, 1e-6).passed());
  }
  std::mt19937_64 rng(6);
  const CheckReport random = check_euler_lagrange(mesh8(), c.nl, c.params, oracle::random_field(mesh8(), rng), 1e-6);
  EXPECT_FALSE(random.passed());
  EXPECT_GT(find(random, "residual_dual_norm").value, 1e-2);
  const CheckReport zero = check_euler_lagrange(mesh8(), c.nl, c.params, GridFunction(mesh8()), 1e-6);
  EXPECT_EQ(find(zero, "residual_dual_norm").value, 0.0);
  EXPECT_FALSE(zero.passed());
}

TEST(VerifyFields, ReferenceSuiteIsGreen) {
  const SolverConfig c = reference_config();
  const SolutionTriple& t = reference_triple();
  const std::vector<CheckReport> reports =
      verify_fields(mesh8(), c.nl, c.params, {t.u1, t.u2, t.u3}, VerifyTolerances{});
  EXPECT_EQ(reports.size(), 10u);
  for (const CheckReport& r : reports) EXPECT_TRUE(r.passed()) << r.name;
  const std::vector<CheckReport> again =
      verify_fields(mesh8(), c.nl, c.params, {t.u1, t.u2, t.u3}, VerifyTolerances{});
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = 0; j < reports[i].measurements.size(); ++j) {
      EXPECT_EQ(reports[i].measurements[j].value, again[i].measurements[j].value);
    }
  }
}
