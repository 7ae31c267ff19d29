#include <gtest/gtest.h>

#include "einsym/geometry.hpp"
#include "einsym/prolongation.hpp"
#include "einsym/serialize.hpp"
#include "generators.hpp"

using namespace einsym;

namespace {

bool has_kind(const Expr& e, VarKind k) {
  return e.contains_if([k](VarId v) { return var::kind(v) == k; });
}

VectorField scaling(const MetricContext& ctx) {
  VectorField vf(ctx.dim());
  for (auto [m, n] : ctx.pairs()) vf.Phi.at(m, n) = sym::g(m, n);
  return vf;
}

}  // namespace

TEST(JetCalculus, PartialXOnCoordinatesAndFunctions) {
  const Expr p = sym::x(1) * sym::x(1) * Expr::variable(var::H(2)) + sym::g(1, 2);
  const Expr want = Expr(2L) * sym::x(1) * Expr::variable(var::H(2)) +
                    sym::x(1) * sym::x(1) * Expr::variable(var::parse("dH[2;x1]"));
  EXPECT_EQ(partial_x(p, 1), want);
  EXPECT_TRUE(partial_x(sym::g(1, 1) * sym::d1(1, 1, 1), 1).is_zero());
}

TEST(JetCalculus, PartialGOfInverseMetric) {
  const MetricContext ctx(2);
  EXPECT_EQ(partial_g(ctx, sym::gi(1, 1), 1, 1), -(sym::gi(1, 1) * sym::gi(1, 1)));
  EXPECT_EQ(partial_g(ctx, sym::gi(1, 1), 1, 2), Expr(-2L) * sym::gi(1, 1) * sym::gi(1, 2));
  EXPECT_EQ(partial_g(ctx, sym::g(2, 1), 1, 2), Expr(1L));
}

TEST(JetCalculus, DependenceRules) {
  const MetricContext ctx(2);
  const Expr h = Expr::variable(var::H(1));
  EXPECT_FALSE(partial_g(ctx, h, 1, 1).is_zero());
  EXPECT_TRUE(partial_g(ctx, h, 1, 1, Dependence{false}).is_zero());
  const Expr pt = Expr::variable(var::PhiTilde(1, 2));
  EXPECT_TRUE(partial_g(ctx, pt, 1, 1).is_zero());
  EXPECT_FALSE(partial_g(ctx, pt, 2, 1).is_zero());
  EXPECT_TRUE(partial_g(ctx, Expr::variable(var::f(1)), 1, 1).is_zero());
}

TEST(JetCalculus, TotalDerivativeIsDerivation) {
  const MetricContext ctx(3);
  einsym::testing::Gen gen(41);
  for (int i = 0; i < 200; ++i) {
    const Expr a = gen.expr(3, 4, 2);
    const Expr b = gen.expr(3, 4, 2);
    const int alpha = gen.uniform(1, 3);
    EXPECT_EQ(total_derivative(ctx, a * b, alpha),
              total_derivative(ctx, a, alpha) * b + a * total_derivative(ctx, b, alpha));
  }
}

TEST(JetCalculus, TotalDerivativesCommute) {
  const MetricContext ctx(2);
  const VectorField vf = generic_field(ctx);
  const Expr p = vf.phi(1, 2) * sym::gi(1, 1) + vf.h(2) * sym::d1(1, 1, 2);
  EXPECT_EQ(total_derivative(ctx, total_derivative(ctx, p, 1), 2),
            total_derivative(ctx, total_derivative(ctx, p, 2), 1));
}

class RouteEquivalence : public ::testing::TestWithParam<int> {};

TEST_P(RouteEquivalence, FirstOrder) {
  const MetricContext ctx(GetParam());
  const VectorField vf = generic_field(ctx);
  const int n = ctx.dim();
  for (auto [t, g] : ctx.pairs()) {
    for (int a = 1; a <= n; ++a) {
      EXPECT_EQ(phi_first(ctx, vf, t, g, a), phi_first_total(ctx, vf, t, g, a)) << t << g << a;
    }
  }
}

TEST_P(RouteEquivalence, SecondOrder) {
  const MetricContext ctx(GetParam());
  const VectorField vf = generic_field(ctx);
  for (auto [a, b] : ctx.pairs()) {
    for (auto [g, d] : ctx.pairs()) {
      const Expr expanded = phi_second(ctx, vf, a, b, g, d);
      EXPECT_FALSE(has_kind(expanded, VarKind::D3));
      EXPECT_EQ(expanded, phi_second_total(ctx, vf, a, b, g, d)) << a << b << g << d;
      EXPECT_EQ(expanded, phi_second(ctx, vf, b, a, d, g));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, RouteEquivalence, ::testing::Values(2, 3));

TEST(Prolongation, SymmetriesOfTables) {
  const MetricContext ctx(3);
  const ProlongationTables t(ctx, generic_field(ctx));
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      for (int c = 1; c <= 3; ++c) {
        EXPECT_EQ(t.first(a, b, c), t.first(b, a, c));
        for (int d = 1; d <= 3; ++d) EXPECT_EQ(t.second(a, b, c, d), t.second(b, a, d, c));
      }
    }
  }
}

TEST(Prolongation, ScalingCoefficients) {
  const MetricContext ctx(3);
  const VectorField vf = scaling(ctx);
  EXPECT_EQ(phi_first(ctx, vf, 1, 2, 3), sym::d1(3, 1, 2));
  EXPECT_EQ(phi_second(ctx, vf, 1, 2, 3, 1), sym::d2(1, 3, 1, 2));
}

TEST(Prolongation, LinearInTheField) {
  const MetricContext ctx(2);
  const VectorField a = generic_field(ctx);
  const VectorField b = scaling(ctx);
  const VectorField sum = a + Rational(3) * b;
  const ProlongedAction pa = prolong_einstein(ctx, a);
  const ProlongedAction pb = prolong_einstein(ctx, b);
  const ProlongedAction ps = prolong_einstein(ctx, sum);
  for (auto [m, n] : ctx.pairs()) EXPECT_EQ(ps.at(m, n), pa.at(m, n) + Rational(3) * pb.at(m, n));
}

class AssembledVsDirect : public ::testing::TestWithParam<int> {};

TEST_P(AssembledVsDirect, AgreeExactly) {
  const MetricContext ctx(GetParam());
  const VectorField vf = generic_field(ctx);
  const ProlongationTables t(ctx, vf, Route::Expanded, 4);
  const ProlongedAction assembled = prolong_einstein(ctx, t, 4);
  for (auto [a, b] : ctx.pairs()) {
    const Expr direct = prolong_direct(ctx, t, einstein_delta(ctx, a, b));
    EXPECT_EQ(direct, assembled.at(a, b)) << a << b;
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, AssembledVsDirect, ::testing::Values(2, 3));

TEST(Prolongation, ScalingActionIsLambdaTerm) {
  const MetricContext ctx(3);
  const ProlongedAction act = prolong_einstein(ctx, scaling(ctx));
  for (auto [a, b] : ctx.pairs()) {
    EXPECT_TRUE(is_zero_mod_inverse(ctx, act.at(a, b) + sym::lam() * sym::g(a, b))) << to_text(act.at(a, b));
  }
}

TEST(Prolongation, JobsDoNotChangeResult) {
  const MetricContext ctx(2);
  const VectorField vf = generic_field(ctx);
  const ProlongedAction one = prolong_einstein(ctx, vf, 1);
  const ProlongedAction four = prolong_einstein(ctx, vf, 4);
  EXPECT_EQ(one.action.values(), four.action.values());
}
