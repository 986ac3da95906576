#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "critp/error.hpp"
#include "critp/nehari.hpp"
#include "critp/optimizer.hpp"
#include "oracles.hpp"

using namespace critp;

namespace {

RunParameters reference_params() { return RunParameters{2.0, 3, 50.0, 1e-8}; }

Nonlinearity signed_q4() {
  return Nonlinearity::with_default_constants(Family::PowerSumSigned, 4.0, 4.0);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no critp::Error thrown";
  return ErrorKind::Io;
}

double norm(const GridFunction& u) { return std::sqrt(dot(u, u)); }

// cos^2 bump supported in |x - c|_inf < half_width.
GridFunction bump(const Mesh& mesh, double cx, double half_width) {
  return interpolate(mesh, [&](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double c = d == 0 ? cx : 0.5;
      const double s = std::abs(x[d] - c) / half_width;
      v *= s < 1.0 ? std::pow(std::cos(0.5 * M_PI * s), 2) : 0.0;
    }
    return v;
  });
}

}  // namespace

TEST(ScaleOnCoefficients, ClosedFormRoots) {
  // A = B = lambda*C = 1: 1 - s - s^2 = 0 with s = t^2
  EXPECT_NEAR(scale_on_coefficients({1.0, 1.0, 1.0}, 2.0, 6.0, 4.0, 1.0, 1.0).t_lambda,
              std::sqrt((std::sqrt(5.0) - 1.0) / 2.0), 1e-12);
  EXPECT_NEAR(scale_on_coefficients({1.0, 1.0, 1.0}, 2.0, 6.0, 4.0, 1.0, 1.0).t_lambda, 0.7861514, 1e-7);
  // lambda*C = 4: 1 - 4s - s^2 = 0
  EXPECT_NEAR(scale_on_coefficients({1.0, 1.0, 4.0}, 2.0, 6.0, 4.0, 1.0, 1.0).t_lambda,
              std::sqrt(std::sqrt(5.0) - 2.0), 1e-12);
  EXPECT_NEAR(scale_on_coefficients({1.0, 1.0, 1.0}, 2.0, 6.0, 4.0, 4.0, 1.0).t_lambda, 0.4858683, 1e-7);
}

TEST(ScaleOnCoefficients, Bracket) {
  EXPECT_DOUBLE_EQ(fibering_bracket(1.0, 1.0, 16.0, 1.0, 4.0, 2.0), 0.25);
  const ScaleResult r = scale_on_coefficients({1.0, 1.0, 1.0}, 2.0, 6.0, 4.0, 16.0, 1.0);
  EXPECT_DOUBLE_EQ(r.t1_bracket, 0.25);
  EXPECT_LE(r.t_lambda, r.t1_bracket);
}

TEST(SmallestPositiveRoot, NoSignChange) {
  EXPECT_EQ(kind_of([] { smallest_positive_root([](double t) { return 1.0 + t; }, 1.0); }),
            ErrorKind::NoRoot);
  EXPECT_EQ(kind_of([] { smallest_positive_root([](double t) { return -t; }, 1.0); }),
            ErrorKind::NoRoot);
}

TEST(SmallestPositiveRoot, PicksSmallestRoot) {
  // roots at 0.5, 2 and 3; negative at the start point 4
  auto phi = [](double t) { return (0.5 - t) * (2.0 - t) * (3.0 - t); };
  EXPECT_NEAR(smallest_positive_root(phi, 4.0), 0.5, 1e-15);
}

TEST(FiberingCoefficients, CentreHatOracle) {
  // tests/oracles/kuhn_hat.py, N = 3, m = 2
  const Mesh mesh = build_mesh(3, 2);
  GridFunction u(mesh);
  const int centre[3] = {1, 1, 1};
  u[mesh.vertex_index(centre)] = 1.0;
  const FiberingCoefficients c = fibering_coefficients(mesh, signed_q4(), reference_params(), u);
  EXPECT_NEAR(c.A, 3.0, 1e-13);
  EXPECT_NEAR(c.B, 0.125, 1e-14);
  EXPECT_NEAR(c.C, 0.125, 1e-14);
}

TEST(FiberingCoefficients, HomogeneityAndAdditivity) {
  const Mesh mesh = build_mesh(3, 8);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  const GridFunction w0 = bump(mesh, 0.25, 0.2);
  const GridFunction w1 = bump(mesh, 0.75, 0.2);
  const FiberingCoefficients c0 = fibering_coefficients(mesh, nl, params, w0);
  const FiberingCoefficients c1 = fibering_coefficients(mesh, nl, params, w1);
  const FiberingCoefficients cs = fibering_coefficients(mesh, nl, params, 1.7 * w0);
  EXPECT_NEAR(cs.A, std::pow(1.7, 2) * c0.A, 1e-12 * cs.A);
  EXPECT_NEAR(cs.B, std::pow(1.7, 6) * c0.B, 1e-12 * cs.B);
  EXPECT_NEAR(cs.C, std::pow(1.7, 4) * c0.C, 1e-12 * cs.C);
  const FiberingCoefficients sum = fibering_coefficients(mesh, nl, params, w0 + w1);
  EXPECT_NEAR(sum.A, c0.A + c1.A, 1e-12 * sum.A);
  EXPECT_NEAR(sum.B, c0.B + c1.B, 1e-12 * sum.B);
  EXPECT_NEAR(sum.C, c0.C + c1.C, 1e-12 * sum.C);
  EXPECT_EQ(kind_of([&] { fibering_coefficients(mesh, nl, params, GridFunction(mesh)); }),
            ErrorKind::DegenerateInput);
}

TEST(ConstraintPhi, Examples) {
  const Mesh mesh = build_mesh(3, 4);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  EXPECT_EQ(constraint_phi(mesh, nl, params, GridFunction(mesh), Part::Positive), 0.0);
  const GridFunction w = oracle::sine_bump(mesh);
  EXPECT_EQ(constraint_phi(mesh, nl, params, -1.0 * w, Part::Positive), 0.0);
  const FiberingCoefficients c = fibering_coefficients(mesh, nl, params, w);
  for (double t : {0.5, 1.0}) {
    const double expected = c.A * t * t - c.B * std::pow(t, 6) - params.lambda * 2.0 * c.C * std::pow(t, 4);
    EXPECT_NEAR(constraint_phi(mesh, nl, params, t * w, Part::Positive), expected,
                1e-12 * std::abs(expected) + 1e-14);
    EXPECT_NEAR(constraint_phi(mesh, nl, params, -t * w, Part::Negative), expected,
                1e-12 * std::abs(expected) + 1e-14);
  }
}

TEST(ScaleToManifold, RootIsOnManifold) {
  const Mesh mesh = build_mesh(3, 6);
  const RunParameters params = reference_params();
  for (Family family : {Family::PowerSumSigned, Family::PowerSumPosPart}) {
    const Nonlinearity nl = Nonlinearity::with_default_constants(family, 4.0, 3.0);
    const GridFunction w = oracle::sine_bump(mesh);
    for (Part part : {Part::Positive, Part::Negative}) {
      const GridFunction signed_w = part == Part::Positive ? w : -1.0 * w;
      const ScaleResult r = scale_to_manifold(mesh, nl, params, signed_w, part);
      EXPECT_LE(r.relative_residual, 1e-10);
      const GridFunction on = r.t_lambda * signed_w;
      EXPECT_LE(std::abs(constraint_phi(mesh, nl, params, on, part)),
                1e-10 * part_stiffness(mesh, params, on, part));
    }
  }
}

TEST(ScaleToManifold, Errors) {
  const Mesh mesh = build_mesh(3, 4);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  const GridFunction w = oracle::sine_bump(mesh);
  EXPECT_EQ(kind_of([&] { scale_to_manifold(mesh, nl, params, -1.0 * w, Part::Positive); }),
            ErrorKind::Sign);
  EXPECT_EQ(kind_of([&] { scale_to_manifold(mesh, nl, params, w, Part::Negative); }),
            ErrorKind::Sign);
  EXPECT_EQ(kind_of([&] { scale_to_manifold(mesh, nl, params, GridFunction(mesh), Part::Positive); }),
            ErrorKind::DegenerateInput);
}

TEST(ScaleToManifold, FiberingSignStructure) {
  const Mesh mesh = build_mesh(3, 5);
  const RunParameters params = reference_params();
  std::mt19937_64 rng(8);
  for (Family family : {Family::PowerSumSigned, Family::PowerSumPosPart}) {
    const Nonlinearity nl = Nonlinearity::with_default_constants(family, 4.0, 3.0);
    for (int i = 0; i < 25; ++i) {
      const GridFunction w = oracle::random_field(mesh, rng, 0.0, 1.0);
      const ScaleResult r = scale_to_manifold(mesh, nl, params, w, Part::Positive);
      EXPECT_GT(constraint_phi(mesh, nl, params, (r.t_lambda / 10) * w, Part::Positive), 0.0);
      const double big = 10.0 * std::max(r.t_lambda, r.t1_bracket);
      EXPECT_LT(constraint_phi(mesh, nl, params, big * w, Part::Positive), 0.0);
    }
  }
}

TEST(ScaleToManifold, DecreasesInLambdaBelowBracket) {
  const Mesh mesh = build_mesh(3, 6);
  const Nonlinearity nl = signed_q4();
  const GridFunction w = oracle::sine_bump(mesh);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda = 1.0; lambda <= 256.0; lambda *= 2.0) {
    const RunParameters params{2.0, 3, lambda, 1e-8};
    const ScaleResult r = scale_to_manifold(mesh, nl, params, w, Part::Positive);
    EXPECT_LE(r.t_lambda, r.t1_bracket);
    EXPECT_LE(r.t_lambda, previous);
    previous = r.t_lambda;
  }
}

TEST(ProjectPair, SymmetricBumps) {
  const Mesh mesh = build_mesh(3, 8);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  const GridFunction w0 = bump(mesh, 0.25, 0.2);
  const GridFunction w1 = -1.0 * bump(mesh, 0.75, 0.2);
  const PairProjection pair = project_pair_to_M3(mesh, nl, params, w0, w1);
  EXPECT_NEAR(pair.t_pos, pair.t_neg, 1e-12 * pair.t_pos);
  EXPECT_EQ(pair.t_pos, scale_to_manifold(mesh, nl, params, w0, Part::Positive).t_lambda);
  const double a_pos = part_stiffness(mesh, params, pair.combined, Part::Positive);
  const double a_neg = part_stiffness(mesh, params, pair.combined, Part::Negative);
  EXPECT_LE(std::abs(constraint_phi(mesh, nl, params, pair.combined, Part::Positive)), 1e-10 * a_pos);
  EXPECT_LE(std::abs(constraint_phi(mesh, nl, params, pair.combined, Part::Negative)), 1e-10 * a_neg);
}

TEST(ProjectPair, Errors) {
  const Mesh mesh = build_mesh(3, 8);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  const GridFunction w0 = bump(mesh, 0.4, 0.3);
  const GridFunction w1 = -1.0 * bump(mesh, 0.6, 0.3);
  EXPECT_EQ(kind_of([&] { project_pair_to_M3(mesh, nl, params, w0, w1); }), ErrorKind::Precondition);
  EXPECT_EQ(kind_of([&] { project_pair_to_M3(mesh, nl, params, w0, GridFunction(mesh)); }),
            ErrorKind::DegenerateInput);
}

namespace {

void constraint_gradient_fd(double p, int dim, double q) {
  const Mesh mesh = build_mesh(dim, 4);
  const RunParameters params{p, dim, 3.0, 1e-8};
  const Nonlinearity nl = Nonlinearity::with_default_constants(Family::PowerSumPosPart, q, q);
  std::mt19937_64 rng(31);
  GridFunction u = oracle::random_field(mesh, rng, 0.5, 1.0);
  for (Part part : {Part::Positive, Part::Negative}) {
    const GridFunction w = part == Part::Positive ? u : -1.0 * u;
    const GridFunction g = constraint_gradient(mesh, nl, params, w, part);
    auto J = [&](const GridFunction& v) { return constraint_phi(mesh, nl, params, v, part); };
    for (int i = 0; i < 10; ++i) {
      const GridFunction d = oracle::random_field(mesh, rng);
      const double exact = dot(g, d);
      const double fd = oracle::central_difference(J, w, d, 1e-5);
      EXPECT_LE(std::abs(fd - exact), 1e-5 * std::abs(exact));
    }
  }
}

}  // namespace

TEST(ConstraintGradient, FiniteDifference) {
  constraint_gradient_fd(2.0, 3, 4.0);
  constraint_gradient_fd(1.5, 2, 3.0);
}

TEST(ConstraintGradient, SignConventions) {
  const Mesh mesh = build_mesh(3, 6);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  const GridFunction u = initial_point(mesh, nl, params, KIndex::K1, 0);
  // outward: the fibering map crosses zero downward on M1
  EXPECT_LT(dot(constraint_gradient(mesh, nl, params, u, Part::Positive), u), 0.0);
  EXPECT_EQ(max_abs(constraint_gradient(mesh, nl, params, -1.0 * u, Part::Positive)), 0.0);
  EXPECT_EQ(max_abs(constraint_gradient(mesh, nl, params, u, Part::Negative)), 0.0);
}

namespace {

struct TangentCase {
  KIndex k;
  const char* label;
};

}  // namespace

TEST(TangentProject, PairingIdempotenceAndNormalDirection) {
  const Mesh mesh = build_mesh(3, 8);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  std::mt19937_64 rng(4);
  for (TangentCase c : {TangentCase{KIndex::K1, "K1"}, TangentCase{KIndex::K2, "K2"},
                        TangentCase{KIndex::K3, "K3"}}) {
    const GridFunction u = initial_point(mesh, nl, params, c.k, 0);
    auto [plus, minus] = plus_minus_parts(u);
    std::vector<std::pair<GridFunction, GridFunction>> active;  // (grad phi, normal direction)
    if (c.k != KIndex::K2) active.emplace_back(constraint_gradient(mesh, nl, params, u, Part::Positive), plus);
    if (c.k != KIndex::K1) active.emplace_back(constraint_gradient(mesh, nl, params, u, Part::Negative), minus);
    for (int i = 0; i < 10; ++i) {
      const GridFunction v = oracle::random_field(mesh, rng);
      const GridFunction pv = tangent_project(mesh, nl, params, u, v, c.k);
      for (const auto& [g, n] : active) {
        EXPECT_LE(std::abs(dot(g, pv)), 1e-9 * norm(g) * norm(v)) << c.label;
      }
      const GridFunction ppv = tangent_project(mesh, nl, params, u, pv, c.k);
      EXPECT_LE(norm(ppv - pv), 1e-12 * norm(pv)) << c.label;
    }
    for (const auto& [g, n] : active) {
      // the normal direction itself projects to zero
      EXPECT_LE(max_abs(tangent_project(mesh, nl, params, u, n, c.k)), 1e-12 * max_abs(n)) << c.label;
    }
    if (c.k == KIndex::K3) {
      EXPECT_EQ(dot(active[0].first, minus), 0.0);
      EXPECT_EQ(dot(active[1].first, plus), 0.0);
    }
  }
}

TEST(TangentProject, TangentVectorIsFixed) {
  const Mesh mesh = build_mesh(3, 6);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  const GridFunction u = initial_point(mesh, nl, params, KIndex::K1, 0);
  const GridFunction g = constraint_gradient(mesh, nl, params, u, Part::Positive);
  std::mt19937_64 rng(12);
  GridFunction v = oracle::random_field(mesh, rng);
  v -= (dot(g, v) / dot(g, u)) * u;
  const GridFunction pv = tangent_project(mesh, nl, params, u, v, KIndex::K1);
  EXPECT_LE(norm(pv - v), 1e-12 * norm(v));
}

TEST(TangentProject, DegenerateConstraint) {
  const Mesh mesh = build_mesh(3, 4);
  const RunParameters params = reference_params();
  const Nonlinearity nl = signed_q4();
  std::mt19937_64 rng(1);
  const GridFunction v = oracle::random_field(mesh, rng);
  EXPECT_EQ(kind_of([&] { tangent_project(mesh, nl, params, GridFunction(mesh), v, KIndex::K1); }),
            ErrorKind::DegenerateConstraint);
  EXPECT_EQ(kind_of([&] { tangent_project(mesh, nl, params, oracle::sine_bump(mesh), v, KIndex::K3); }),
            ErrorKind::DegenerateConstraint);
}
