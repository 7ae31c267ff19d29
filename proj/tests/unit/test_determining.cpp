#include <gtest/gtest.h>

#include <set>

#include "einsym/determining.hpp"
#include "einsym/geometry.hpp"
#include "einsym/serialize.hpp"
#include "generators.hpp"

using namespace einsym;

namespace {

bool free_of_jets(const Expr& e) {
  return !e.contains_if([](VarId v) { return is_jet_derivative(v); });
}

void expect_passed(const ProofReport& rep) {
  for (const ProofStep& s : rep.steps) EXPECT_TRUE(s.passed) << rep.title << ": " << s.paper_eq << " " << s.name << " " << s.detail;
  EXPECT_TRUE(rep.passed());
}

}  // namespace

TEST(Classify, PartitionSumsBack) {
  einsym::testing::Gen gen(7);
  for (int i = 0; i < 300; ++i) {
    Expr p;
    for (int t = 0; t < 4; ++t) {
      Expr m = Expr(gen.rational());
      const int d1 = gen.uniform(0, 3);
      const int d2 = d1 <= 1 ? gen.uniform(0, 1) : 0;
      for (int k = 0; k < d1; ++k) m *= sym::d1(gen.uniform(1, 3), gen.uniform(1, 3), gen.uniform(1, 3));
      for (int k = 0; k < d2; ++k) m *= sym::d2(gen.uniform(1, 3), gen.uniform(1, 3), gen.uniform(1, 3), gen.uniform(1, 3));
      if (gen.coin()) m *= sym::gi(1, 2);
      p += m;
    }
    Expr sum;
    for (const auto& [cls, part] : classify(p)) sum += part;
    EXPECT_EQ(sum, p);
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(Expr(3L)).begin()->first, TermClass::None);
  EXPECT_EQ(classify(sym::d1(1, 1, 2) * sym::d2(1, 1, 2, 2)).begin()->first, TermClass::DG_DDG);
  const MetricContext ctx(2);
  const auto parts = classify(christoffel(ctx, 1, 1, 2) * christoffel(ctx, 2, 1, 1));
  ASSERT_EQ(parts.size(), 1U);
  EXPECT_EQ(parts.begin()->first, TermClass::DG_DG);
  EXPECT_THROW(classify(sym::d2(1, 1, 1, 1) * sym::d2(1, 2, 1, 1)), UnexpectedTermError);
  EXPECT_THROW(classify(sym::d1(1, 1, 1).pow(4)), UnexpectedTermError);
}

TEST(Classify, Names) {
  for (TermClass c : {TermClass::None, TermClass::DG, TermClass::DG_DG, TermClass::DG_DG_DG, TermClass::DDG,
                      TermClass::DG_DDG}) {
    EXPECT_EQ(class_from_name(class_name(c)), c);
  }
  EXPECT_FALSE(class_from_name("nope").has_value());
}

TEST(AbsentAtoms, NeverInTheSystem) {
  for (int n : {2, 3}) {
    const MetricContext ctx(n);
    const EinsteinSystem sys = einstein_system(ctx);
    const auto absent = absent_d2_atoms(ctx, sys);
    const std::set<VarId> absent_set(absent.begin(), absent.end());
    for (VarId v : dg_ddg_atoms(ctx)) EXPECT_TRUE(absent_set.contains(v)) << var::name(v);
    for (VarId v : ddg_diag_atoms(ctx)) EXPECT_TRUE(absent_set.contains(v)) << var::name(v);
    for (VarId v : ddg_offdiag_atoms(ctx)) EXPECT_TRUE(absent_set.contains(v)) << var::name(v);
  }
}

class MixedClass : public ::testing::TestWithParam<int> {};

TEST_P(MixedClass, HalfTheClosedForm) {
  const MetricContext ctx(GetParam());
  const DeterminingSystem sys = extract_dg_ddg(ctx, 4);
  const auto n = static_cast<std::size_t>(ctx.dim());
  EXPECT_EQ(sys.constraints.size(), ctx.pairs().size() * n * ctx.pairs().size() * n * n);
  for (const Constraint& c : sys.constraints) {
    const auto& i = c.indices;
    EXPECT_TRUE(free_of_jets(c.expr));
    EXPECT_EQ(Expr(2L) * c.expr, dg_ddg_formula(ctx, i[0], i[1], i[2], i[3], i[4], i[5], i[6])) << index_label(i);
  }
  EXPECT_TRUE(std::is_sorted(sys.constraints.begin(), sys.constraints.end(),
                             [](const Constraint& a, const Constraint& b) { return a.indices < b.indices; }));
}

INSTANTIATE_TEST_SUITE_P(Dims, MixedClass, ::testing::Values(2, 3));

TEST(MixedClass, ReducedShapeAtThreeDimensions) {
  const MetricContext ctx(3);
  const DeterminingSystem sys = extract_dg_ddg(ctx);
  // alpha = beta = 1, gamma = 2, sigma = 3, rho = 1, (mu nu) = (1 1)
  const Constraint* c = find_constraint(sys, {1, 1, 2, 1, 1, 1, 3});
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(Expr(2L) * c->expr, sym::gi(3, 3) * h_dg(2, 1, 3));
}

TEST(MixedClass, GenericRankForcesZero) {
  for (int n : {2, 3}) {
    const MetricContext ctx(n);
    const DeterminingSystem sys = extract_dg_ddg(ctx);
    std::vector<Expr> eqs;
    for (const Constraint& c : sys.constraints) eqs.push_back(c.expr);
    const LinearSystem ls = linear_system(eqs, h_dg_atoms(ctx));
    EXPECT_TRUE(ls.echelon.full_rank());
    EXPECT_TRUE(ls.echelon.kernel().empty());
  }
}

class Deductions : public ::testing::TestWithParam<int> {};

TEST_P(Deductions, HIndependence) { expect_passed(deduce_h_independence(MetricContext(GetParam()), 4)); }
TEST_P(Deductions, PhiStructure) { expect_passed(deduce_phi_structure(MetricContext(GetParam()), 4)); }
TEST_P(Deductions, FirstDerivatives) { expect_passed(deduce_dg(MetricContext(GetParam()), 4)); }

INSTANTIATE_TEST_SUITE_P(Dims, Deductions, ::testing::Values(2, 3));

TEST(Deductions, TwoDimensionalPathUsesThePrintedSteps) {
  const ProofReport rep = deduce_h_independence(MetricContext(2));
  std::vector<std::string> labels;
  for (const ProofStep& s : rep.steps) labels.push_back(s.paper_eq);
  EXPECT_NE(std::find(labels.begin(), labels.end(), "(33)"), labels.end());
  EXPECT_NE(std::find(labels.begin(), labels.end(), "(35)"), labels.end());
  EXPECT_EQ(std::find(labels.begin(), labels.end(), "(31)"), labels.end());
}

TEST(SecondDerivatives, RoutesAgree) {
  const MetricContext ctx(3);
  const DeterminingSystem a = extract_ddg(ctx, 4, DdgRoute::XOnlyField);
  const DeterminingSystem b = extract_ddg(ctx, 4, DdgRoute::ZeroAfter);
  ASSERT_EQ(a.constraints.size(), b.constraints.size());
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    EXPECT_EQ(a.constraints[i].indices, b.constraints[i].indices);
    EXPECT_EQ(a.constraints[i].expr, b.constraints[i].expr);
    EXPECT_TRUE(free_of_jets(a.constraints[i].expr));
  }
}

TEST(SecondDerivatives, PrintedInstances) {
  const MetricContext ctx(3);
  const DeterminingSystem sys = extract_ddg(ctx);
  // alpha != sigma != beta, alpha != eta != beta (here eta = sigma): one dPhi/dg atom survives
  const Constraint* c = find_constraint(sys, {1, 2, 3, 3}, "(37)");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(Expr(-2L) * c->expr, sym::gi(3, 3) * phi_dg(1, 2, 3, 3));
  // rho = alpha = beta after the alpha != sigma != beta reduction
  const Constraint* d = find_constraint(sys, {1, 1, 1, 2}, "(41)");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(Expr(-2L) * d->expr, sym::gi(2, 2) * (Expr(2L) * h_dx(2, 1) + phi_dg(1, 1, 1, 2)));
}

TEST(SecondDerivatives, CaseLabelsPartition) {
  std::set<std::string> seen;
  for (int a = 1; a <= 4; ++a) {
    for (int b = 1; b <= 4; ++b) {
      for (int e = 1; e <= 4; ++e) {
        for (int s = 1; s <= 4; ++s) {
          const std::string l = ddg_diag_case(a, b, e, s);
          EXPECT_FALSE(l.empty());
          seen.insert(l);
        }
      }
    }
  }
  EXPECT_EQ(seen.size(), 12U);
}

TEST(SecondDerivatives, RulesAreConsistent) {
  for (int n : {2, 3, 4}) {
    const MetricContext ctx(n);
    EXPECT_NO_THROW(phi_metric_rules(ctx, {"(38)", "(40)", "(43)", "(44)", "(45)"}));
  }
  const MetricContext two(2);
  EXPECT_TRUE(phi_metric_rules(two, {"(43)", "(45)"}).empty());
}

TEST(TildePhi, Basics) {
  const MetricContext ctx(3);
  VectorField vf = generic_field(ctx);
  for (Expr& h : vf.H) h = Expr();
  const auto pt = tilde_phi(ctx, vf);
  for (auto [a, b] : ctx.pairs()) EXPECT_EQ(pt.at(a, b), vf.phi(a, b));
  const auto red = tilde_phi(ctx, reduced_field(ctx));
  for (auto [a, b] : ctx.pairs()) EXPECT_EQ(red.at(a, b), Expr::variable(var::PhiTilde(a, b)));
}

TEST(FirstDerivatives, VanishWithoutPhiTilde) {
  const MetricContext ctx(2);
  const DeterminingSystem sys = extract_dg(ctx);
  std::map<VarId, Expr> zero;
  for (VarId v : function_atoms([&] {
         std::vector<Expr> e;
         for (const Constraint& c : sys.constraints) e.push_back(c.expr);
         return e;
       }())) {
    if (var::func_atom(v).kind == FuncKind::PhiTilde) zero.emplace(v, Expr());
  }
  for (const Constraint& c : sys.constraints) EXPECT_TRUE(is_zero_mod_inverse(ctx, substitute(c.expr, zero)));
}
