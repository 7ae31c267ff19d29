#include <gtest/gtest.h>

#include "einsym/geometry.hpp"
#include "einsym/liealg.hpp"
#include "einsym/oracle.hpp"
#include "generators.hpp"

using namespace einsym;

TEST(Sample, Deterministic) {
  const MetricContext ctx(3);
  const std::vector<Expr> cover{Expr::variable(var::H(2)) * sym::lam()};
  const PointAssignment a = sample(ctx, 42, cover);
  const PointAssignment b = sample(ctx, 42, cover);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, sample(ctx, 43, cover).values);
  EXPECT_TRUE(a.values.contains(var::H(2)));
  EXPECT_TRUE(a.values.contains(var::lambda()));
}

TEST(Sample, InverseIsExactAndDetBounded) {
  for (int n : {2, 3, 4}) {
    const MetricContext ctx(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const PointAssignment pt = sample(ctx, seed);
      for (int a = 1; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) {
          Rational s;
          for (int k = 1; k <= n; ++k) s += pt.at(var::inv_metric(a, k)) * pt.at(var::metric(k, b));
          EXPECT_EQ(s, Rational(a == b ? 1 : 0));
        }
      }
      EXPECT_GE(eval(ctx.det(), pt).abs(), Rational(1, 100));
    }
  }
}

TEST(Sample, RejectionBudget) {
  SampleOptions opt;
  opt.min_det = Rational(1000000000L);
  EXPECT_THROW(sample(MetricContext(2), 1, {}, opt), OracleError);
}

TEST(Eval, BasicsAndMissingAtoms) {
  const MetricContext ctx(2);
  const PointAssignment pt = sample(ctx, 7);
  EXPECT_EQ(eval(Expr(), pt), Rational(0));
  EXPECT_EQ(eval(sym::g(1, 1), pt), pt.at(var::metric(1, 1)));
  EXPECT_THROW(eval(Expr::variable(var::f(1)), pt), OracleError);
}

TEST(Eval, RingHomomorphism) {
  const MetricContext ctx(3);
  einsym::testing::Gen gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Expr p = gen.expr();
    const Expr q = gen.expr();
    const PointAssignment pt = sample(ctx, static_cast<std::uint64_t>(trial), {p, q});
    EXPECT_EQ(eval(p + q, pt), eval(p, pt) + eval(q, pt));
    EXPECT_EQ(eval(p * q, pt), eval(p, pt) * eval(q, pt));
  }
}

TEST(Eval, AdjugateFormAgrees) {
  const MetricContext ctx(3, InverseMode::Exact);
  const PointAssignment pt = sample(ctx, 3);
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) EXPECT_EQ(eval(ctx, ctx.inverse(a, b), pt), pt.at(var::inv_metric(a, b)));
  }
}

TEST(Reference, RicciMatchesAndDetectsIndexErrors) {
  const MetricContext ctx(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointAssignment pt = sample(ctx, seed);
    for (auto [a, b] : ctx.pairs()) EXPECT_EQ(eval(ricci(ctx, a, b), pt), reference_ricci(ctx, pt, a, b));
    EXPECT_NE(eval(ricci(ctx, 1, 1), pt), reference_ricci(ctx, pt, 1, 2));
  }
}

TEST(Reference, FirstDerivativeFormVanishesWithoutFirstDerivatives) {
  const MetricContext ctx(2);
  PointAssignment pt = sample(ctx, 9);
  for (VarId v : enumerate_vars(ctx, 1)) pt.values[v] = Rational(0);
  for (auto [a, b] : ctx.pairs()) {
    for (auto [m, n] : ctx.pairs()) {
      for (int k = 1; k <= 2; ++k) EXPECT_TRUE(eval(dricci_d1(ctx, a, b, k, m, n), pt).is_zero());
    }
  }
}

TEST(Oracle, TargetsPassAtTwoDimensions) {
  const MetricContext ctx(2);
  for (const std::string t : {"ricci", "dricci", "prolong-gct", "prolong-scaling", "all"}) {
    const OracleReport r = run_oracle(ctx, t, 100, 1, 2);
    EXPECT_TRUE(r.passed()) << t << ": " << (r.failures.empty() ? "" : r.failures.front());
    EXPECT_EQ(r.evaluations, r.identities * 100U);
  }
}

TEST(Oracle, DricciAtThreeDimensions) {
  const OracleReport r = run_oracle(MetricContext(3), "dricci", 10, 100, 4);
  EXPECT_TRUE(r.passed());
}

TEST(Oracle, WrongCombinationIsCaught) {
  const MetricContext ctx(2);
  const ProlongedAction act = prolong_einstein(ctx, gct_generator(ctx));
  const Expr bad = gct_residual(ctx, act, 1, 2, -1, -1);
  int nonzero = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) nonzero += eval(bad, sample(ctx, seed, {bad})).is_zero() ? 0 : 1;
  EXPECT_GT(nonzero, 15);
}

TEST(Oracle, UnknownTarget) { EXPECT_THROW(run_oracle(MetricContext(2), "nope", 1, 1), std::invalid_argument); }

TEST(Oracle, ReportIndependentOfJobs) {
  const MetricContext ctx(2);
  EXPECT_EQ(to_json(run_oracle(ctx, "all", 20, 5, 1)).dump(), to_json(run_oracle(ctx, "all", 20, 5, 4)).dump());
}

TEST(Oracle, CertifiedZerosListed) {
  const auto ids = certified_zeros(MetricContext(2), "all");
  EXPECT_GT(ids.size(), 50U);
  for (const auto& id : ids) EXPECT_FALSE(id.name.empty());
}
