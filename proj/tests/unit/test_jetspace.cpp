#include <gtest/gtest.h>

#include "einsym/jetspace.hpp"
#include "einsym/serialize.hpp"
#include "generators.hpp"

using namespace einsym;

TEST(Jetspace, CanonExamples) {
  MetricContext ctx(3);
  EXPECT_EQ(canon(ctx, VarKind::Metric, {2, 1}), var::metric(1, 2));
  EXPECT_EQ(canon(ctx, VarKind::D2, {3, 1, 2, 2}), var::d2(1, 3, 2, 2));
  EXPECT_EQ(canon(ctx, VarKind::Metric, {1, 1}), var::metric(1, 1));
  EXPECT_THROW(canon(ctx, VarKind::Metric, {1, 4}), std::out_of_range);
  EXPECT_THROW(canon(ctx, VarKind::D1, {0, 1, 1}), std::out_of_range);
}

TEST(Jetspace, CanonIdempotent) {
  einsym::testing::Gen gen(21);
  MetricContext ctx(4);
  for (int i = 0; i < 500; ++i) {
    std::vector<int> raw;
    for (int k = 0; k < 4; ++k) raw.push_back(gen.uniform(1, 4));
    VarId once = canon(ctx, VarKind::D2, raw);
    JetVar j = var::decode(once);
    VarId twice = canon(ctx, VarKind::D2, {j.idx[0], j.idx[1], j.idx[2], j.idx[3]});
    ASSERT_EQ(once, twice);
  }
}

TEST(Jetspace, EnumerationCounts) {
  EXPECT_EQ(enumerate_vars(MetricContext(2), 0).size(), 3U);
  EXPECT_EQ(enumerate_vars(MetricContext(2), 1).size(), 6U);
  EXPECT_EQ(enumerate_vars(MetricContext(2), 2).size(), 9U);
  for (int n = 2; n <= 4; ++n) {
    MetricContext ctx(n);
    const std::size_t p = n * (n + 1) / 2;
    const std::size_t c3 = n * (n + 1) * (n + 2) / 6;
    EXPECT_EQ(enumerate_vars(ctx, 0).size(), p);
    EXPECT_EQ(enumerate_vars(ctx, 1).size(), n * p);
    EXPECT_EQ(enumerate_vars(ctx, 2).size(), p * p);
    EXPECT_EQ(enumerate_vars(ctx, 3).size(), c3 * p);
    for (int order = 0; order <= 3; ++order) {
      auto vars = enumerate_vars(ctx, order);
      EXPECT_TRUE(std::is_sorted(vars.begin(), vars.end()));
      EXPECT_EQ(std::adjacent_find(vars.begin(), vars.end()), vars.end());
    }
  }
}

TEST(Jetspace, XSymbols) {
  MetricContext ctx(3);
  EXPECT_EQ(x_symbol_mixed(ctx, 1, 1, 1, 1), Expr(1));
  EXPECT_EQ(x_symbol_mixed(ctx, 1, 2, 1, 2), Expr(1));
  EXPECT_EQ(x_symbol_mixed(ctx, 2, 1, 1, 2), Expr(1));
  EXPECT_EQ(x_symbol_mixed(ctx, 1, 2, 1, 1), Expr(0));
  EXPECT_EQ(x_symbol_upper(ctx, 2, 3, 1, 1), sym::gi(1, 2) * sym::gi(1, 3));
  EXPECT_EQ(x_symbol_upper(ctx, 2, 3, 1, 2), sym::gi(1, 2) * sym::gi(2, 3) + sym::gi(2, 2) * sym::gi(1, 3));
}

TEST(Jetspace, GCapSymbol) {
  MetricContext ctx(3);
  EXPECT_EQ(g_cap_symbol(ctx, 1, 1), sym::gi(1, 1));
  EXPECT_EQ(g_cap_symbol(ctx, 1, 2), sym::gi(1, 2) * Rational(2));
  EXPECT_EQ(g_cap_symbol(ctx, 3, 2), g_cap_symbol(ctx, 2, 3));
}

TEST(Jetspace, XContractionCollapses) {
  // sum over (mu <= nu) of A_mn X_{cd}^{mn} == A_cd for a symmetric A.
  for (int n = 2; n <= 3; ++n) {
    MetricContext ctx(n);
    SymmetricArray<Expr> a(n);
    einsym::testing::Gen gen(30 + n);
    for (auto& e : a.values()) e = gen.expr(3, 2, n);
    for (int c = 1; c <= n; ++c) {
      for (int d = 1; d <= n; ++d) {
        Expr sum;
        for (auto [m, k] : ctx.pairs()) sum += a.at(m, k) * x_symbol_mixed(ctx, c, d, m, k);
        EXPECT_EQ(sum, a.at(c, d));
      }
    }
  }
}

TEST(Jetspace, ExactInverse2D) {
  MetricContext ctx(2);
  Expr det = sym::g(1, 1) * sym::g(2, 2) - sym::g(1, 2).pow(2);
  EXPECT_EQ(ctx.det(), det);
  EXPECT_EQ(ctx.inverse(1, 1).num, sym::g(2, 2));
  EXPECT_EQ(ctx.inverse(1, 1).den_power, 1U);
  EXPECT_EQ(ctx.inverse(1, 2).num, -sym::g(1, 2));
}

TEST(Jetspace, ExactInverseIsInverse) {
  for (int n = 2; n <= 4; ++n) {
    MetricContext ctx(n);
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        Expr sum;
        for (int k = 1; k <= n; ++k) sum += ctx.inverse(a, k).num * sym::g(k, b);
        EXPECT_EQ(sum, a == b ? ctx.det() : Expr()) << n << " " << a << " " << b;
      }
    }
  }
}

TEST(Jetspace, ModInverseReduction) {
  MetricContext ctx(3);
  Expr p;
  for (int k = 1; k <= 3; ++k) p += sym::gi(1, k) * sym::g(k, 2);
  EXPECT_TRUE(is_zero_mod_inverse(ctx, p * sym::d1(1, 1, 1)));
  Expr q;
  for (int k = 1; k <= 3; ++k) q += sym::gi(2, k) * sym::g(k, 2);
  EXPECT_TRUE(is_zero_mod_inverse(ctx, (q - Expr(1)) * sym::x(1)));
  EXPECT_FALSE(is_zero_mod_inverse(ctx, q));
  FracExpr r = reduce_mod_inverse(ctx, q);
  EXPECT_EQ(r.den_power, 0U);
  EXPECT_EQ(r.num, Expr(1));
}

TEST(Jetspace, SymmetricArraySlots) {
  for (int n = 2; n <= 5; ++n) {
    MetricContext ctx(n);
    std::size_t i = 0;
    for (auto [a, b] : ctx.pairs()) {
      EXPECT_EQ(SymmetricArray<int>::slot(n, a, b), i);
      EXPECT_EQ(SymmetricArray<int>::slot(n, b, a), i);
      ++i;
    }
  }
}
