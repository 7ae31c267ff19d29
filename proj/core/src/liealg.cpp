#include "einsym/liealg.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

#include "einsym/geometry.hpp"
#include "einsym/linsolve.hpp"
#include "einsym/parallel.hpp"
#include "einsym/serialize.hpp"

namespace einsym {
namespace {

Expr atom(VarId v) { return Expr::variable(v); }
Expr param(std::string_view name, int i = 0, int j = 0) { return atom(var::param(name, i, j)); }

Expr func_expr(FuncKind kind, int i, int j, std::vector<int> xs = {}, std::vector<IndexPair> gs = {}) {
  FuncAtom f;
  f.kind = kind;
  f.i = i;
  f.j = j;
  std::sort(xs.begin(), xs.end());
  f.xs = std::move(xs);
  f.gs = std::move(gs);
  return atom(var::func(f));
}

bool is_f_atom(VarId v) { return var::kind(v) == VarKind::Func && var::func_atom(v).kind == FuncKind::F; }

std::vector<std::string> names_of(const std::vector<Expr>& atoms) {
  std::vector<std::string> out;
  for (const Expr& a : atoms) out.push_back(to_text(a));
  return out;
}

ProofStep make_step(std::string name, std::string label, bool passed, const Expr& residual, std::string detail = {}) {
  ProofStep s;
  s.name = std::move(name);
  s.paper_eq = std::move(label);
  s.passed = passed;
  s.residual_hash = residual_hash(residual);
  s.detail = std::move(detail);
  return s;
}

// Every target is implied by the equations, all split by non-function atoms.
ProofStep implied_step(std::string name, std::string label, const std::vector<Expr>& eqs,
                       const std::vector<Expr>& targets, std::vector<std::string> used) {
  const SpanCheck chk = implied(eqs, targets);
  Expr missing;
  for (std::size_t i : chk.missing) missing += targets[i];
  ProofStep s = make_step(std::move(name), std::move(label), chk.ok, missing,
                          std::to_string(eqs.size()) + " equations, " + std::to_string(chk.rows) + " rows, rank " +
                              std::to_string(chk.rank));
  if (!chk.ok) s.detail += ", not implied: " + to_text(missing);
  s.constraints_used = std::move(used);
  s.atoms_eliminated = names_of(targets);
  return s;
}

// Coefficients of p with respect to monomials in the generator f atoms.
std::vector<Expr> split_by_f(const Expr& p) {
  std::vector<Expr> out;
  for (auto& [m, c] : coefficients(p, is_f_atom)) out.push_back(c);
  return out;
}

// Vertical field with PhiT_mn = A g_mn + B_mn for the given A and B.
VectorField ansatz_vertical(const MetricContext& ctx, const Expr& a, const SymmetricArray<Expr>& b) {
  VectorField v(ctx.dim());
  v.dep.h_on_metric = false;
  for (auto [m, n] : ctx.pairs()) v.Phi.at(m, n) = a * sym::g(m, n) + b.at(m, n);
  return v;
}

SymmetricArray<Expr> b_atoms(const MetricContext& ctx) {
  SymmetricArray<Expr> b(ctx.dim());
  for (auto [m, n] : ctx.pairs()) b.at(m, n) = atom(var::B(m, n));
  return b;
}

SymmetricArray<Expr> b_params(const MetricContext& ctx) {
  SymmetricArray<Expr> b(ctx.dim());
  for (auto [m, n] : ctx.pairs()) b.at(m, n) = param("B", m, n);
  return b;
}

// The reduced field with PhiT = A(x) g + B(x).
VectorField ansatz_reduced_field(const MetricContext& ctx) {
  VectorField vf = reduced_field(ctx);
  std::map<VarId, Expr> rules;
  for (auto [m, n] : ctx.pairs()) rules.emplace(var::PhiTilde(m, n), atom(var::A()) * sym::g(m, n) + atom(var::B(m, n)));
  for (Expr& phi : vf.Phi.values()) phi = substitute(phi, rules);
  return vf;
}

// g^{lr} [-(d_r A) g_ab + d_b B_ra + d_a B_rb - d_r B_ab], split by metric degree.
Expr scale_part(const MetricContext& ctx, int a, int b, int l) {
  ExprBuilder out;
  for (int r = 1; r <= ctx.dim(); ++r) {
    out.add_product(sym::gi(l, r) * sym::g(a, b), partial_x(atom(var::A()), r), Rational(-1));
  }
  return out.build();
}

Expr b_combination(const SymmetricArray<Expr>& bm, int a, int b, int r) {
  return partial_x(bm.at(r, a), b) + partial_x(bm.at(r, b), a) - partial_x(bm.at(a, b), r);
}

Expr shift_part(const MetricContext& ctx, const SymmetricArray<Expr>& bm, int a, int b, int l) {
  ExprBuilder out;
  for (int r = 1; r <= ctx.dim(); ++r) out.add_product(sym::gi(l, r), b_combination(bm, a, b, r));
  return out.build();
}

Expr two_dim_combination(const SymmetricArray<Expr>& bm, int a, int r) {
  return Expr(2L) * partial_x(bm.at(r, a), a) - partial_x(bm.at(a, a), r);
}

struct Restricted {
  std::vector<int> indices;  // a, b, l, m, n
  Expr expr;
};

// First-derivative instances of the ansatz field with l, m, n outside {a, b}.
std::vector<Restricted> restricted_ansatz_instances(const MetricContext& ctx, unsigned jobs) {
  const DeterminingSystem sys = extract_dg(ctx, ansatz_reduced_field(ctx), jobs);
  std::vector<Restricted> out;
  for (const Constraint& c : sys.constraints) {
    const auto& i = c.indices;
    const int a = i[0], b = i[1], l = i[2], m = i[3], n = i[4];
    if (l == a || l == b || m == a || m == b || n == a || n == b) continue;
    out.push_back({i, c.expr});
  }
  return out;
}

// Steps shared by every dimension: the substituted instances against the
// closed form, the metric-degree split and the constancy of A.
void substitution_steps(const MetricContext& ctx, unsigned jobs, ProofReport& rep, std::vector<Expr>& shift_eqs) {
  const auto inst = restricted_ansatz_instances(ctx, jobs);
  const SymmetricArray<Expr> bm = b_atoms(ctx);
  std::vector<Expr> scale_eqs;
  Expr bad;
  Expr split_bad;
  std::set<std::vector<int>> seen;
  for (const Restricted& r : inst) {
    const int a = r.indices[0], b = r.indices[1], l = r.indices[2], m = r.indices[3], n = r.indices[4];
    const Expr closed = scale_part(ctx, a, b, l) + shift_part(ctx, bm, a, b, l);
    const Expr diff = r.expr + Rational(1, 2) * g_cap_symbol(ctx, m, n) * closed;
    if (!is_zero_mod_inverse(ctx, diff)) bad += diff;
    if (!seen.insert({a, b, l}).second) continue;
    // terms of metric degree one and zero
    Expr deg1;
    Expr deg0;
    for (auto& [mono, c] : coefficients(closed, [](VarId v) { return var::kind(v) == VarKind::Metric; })) {
      (mono.is_one() ? deg0 : deg1) += Expr::monomial(mono) * c;
    }
    if (deg1 != scale_part(ctx, a, b, l) || deg0 != shift_part(ctx, bm, a, b, l)) split_bad += closed;
    scale_eqs.push_back(deg1);
    shift_eqs.push_back(deg0);
  }
  std::vector<std::string> used{std::to_string(inst.size()) + " instances"};
  ProofStep first = make_step("substituted instances equal -1/2 G^{mn} times the closed form", "(71)", bad.is_zero(), bad,
                            std::to_string(inst.size()) + " instances");
  first.constraints_used = used;
  rep.add(std::move(first));
  rep.add(make_step("split by metric degree", "(72)", split_bad.is_zero() && !scale_eqs.empty(), split_bad,
                    std::to_string(scale_eqs.size()) + " index triples"));
  std::vector<Expr> targets;
  for (int r = 1; r <= ctx.dim(); ++r) targets.push_back(partial_x(atom(var::A()), r));
  rep.add(implied_step("A is constant", "(74)", scale_eqs, targets, {"(72)"}));
}

// Vertical part of [PhiT d/dg, v^GCT] for the given PhiT.
SymmetricArray<Expr> bracket_with_gct(const MetricContext& ctx, const VectorField& vertical) {
  return commutator(ctx, vertical, gct_generator(ctx)).Phi;
}

bool metric_free(const Expr& p) {
  return !p.contains_if([](VarId v) { return var::kind(v) == VarKind::Metric || var::kind(v) == VarKind::InvMetric; });
}

std::vector<VarId> vars_of(const SymmetricArray<Expr>& b) {
  std::vector<VarId> out;
  for (const Expr& e : b.values()) out.push_back(e.leading().mono.factors()[0].var);
  return out;
}

}  // namespace

VectorField gct_generator(const MetricContext& ctx) {
  std::vector<Expr> f;
  for (int g = 1; g <= ctx.dim(); ++g) f.push_back(atom(var::f(g)));
  return gct_generator(ctx, f);
}

VectorField gct_generator(const MetricContext& ctx, const std::vector<Expr>& f) {
  const int n = ctx.dim();
  if (static_cast<int>(f.size()) != n) throw std::invalid_argument("gct_generator: need one function per coordinate");
  VectorField vf(n);
  vf.dep.h_on_metric = false;
  vf.H = f;
  for (auto [a, b] : ctx.pairs()) {
    ExprBuilder e;
    for (int g = 1; g <= n; ++g) {
      e.add_product(sym::g(a, g), partial_x(f[g - 1], b), Rational(-1));
      e.add_product(sym::g(g, b), partial_x(f[g - 1], a), Rational(-1));
    }
    vf.Phi.at(a, b) = e.build();
  }
  return vf;
}

VectorField scaling_generator(const MetricContext& ctx) { return scaling_generator(ctx, param("A")); }

VectorField scaling_generator(const MetricContext& ctx, const Expr& a) {
  VectorField vf(ctx.dim());
  vf.dep.h_on_metric = false;
  for (auto [m, n] : ctx.pairs()) vf.Phi.at(m, n) = a * sym::g(m, n);
  return vf;
}

VectorField vertical_field(const MetricContext& ctx) {
  VectorField vf(ctx.dim());
  vf.dep.h_on_metric = false;
  for (auto [m, n] : ctx.pairs()) vf.Phi.at(m, n) = atom(var::PhiTilde(m, n));
  return vf;
}

Expr apply_field(const MetricContext& ctx, const VectorField& v, const Expr& f, const Dependence& dep) {
  if (f.is_zero()) return {};
  ExprBuilder out;
  for (int a = 1; a <= v.dim; ++a) {
    if (!v.h(a).is_zero()) out.add_product(v.h(a), partial_x(f, a));
  }
  for (auto [m, n] : ctx.pairs()) {
    if (!v.phi(m, n).is_zero()) out.add_product(v.phi(m, n), partial_g(ctx, f, m, n, dep));
  }
  return out.build();
}

VectorField commutator(const MetricContext& ctx, const VectorField& v1, const VectorField& v2) {
  if (v1.dim != v2.dim || v1.dim != ctx.dim()) throw std::invalid_argument("commutator: dimension mismatch");
  VectorField out(v1.dim);
  out.dep.h_on_metric = v1.dep.h_on_metric || v2.dep.h_on_metric;
  for (int a = 1; a <= v1.dim; ++a) {
    out.H[a - 1] = apply_field(ctx, v1, v2.h(a), v2.dep) - apply_field(ctx, v2, v1.h(a), v1.dep);
  }
  for (auto [m, n] : ctx.pairs()) {
    out.Phi.at(m, n) = apply_field(ctx, v1, v2.phi(m, n), v2.dep) - apply_field(ctx, v2, v1.phi(m, n), v1.dep);
  }
  return out;
}

SymmetricArray<Expr> vertical_gct_bracket_formula(const MetricContext& ctx) {
  const int n = ctx.dim();
  auto f = [](int g) { return atom(var::f(g)); };
  auto pt = [](int a, int b) { return atom(var::PhiTilde(std::min(a, b), std::max(a, b))); };
  SymmetricArray<Expr> out(n);
  for (auto [m, nu] : ctx.pairs()) {
    const Expr own = func_expr(FuncKind::PhiTilde, m, nu, {}, {{m, nu}});
    ExprBuilder e;
    for (int a = 1; a <= n; ++a) e.add_product(f(a), partial_x(pt(m, nu), a), Rational(-1));
    for (int g = 1; g <= n; ++g) {
      e.add_product(pt(m, g), partial_x(f(g), nu), Rational(-1));
      e.add_product(pt(g, nu), partial_x(f(g), m), Rational(-1));
      e.add_product(sym::g(m, g) * partial_x(f(g), nu) + sym::g(g, nu) * partial_x(f(g), m), own);
    }
    out.at(m, nu) = e.build();
  }
  return out;
}

Expr gct_residual(const MetricContext& ctx, const ProlongedAction& act, int alpha, int beta, int s1, int s2) {
  ExprBuilder r;
  r.add(act.at(alpha, beta));
  for (int g = 1; g <= ctx.dim(); ++g) {
    const Expr fa = partial_x(atom(var::f(g)), alpha);
    const Expr fb = partial_x(atom(var::f(g)), beta);
    r.add_product(fa, einstein_delta(ctx, g, beta), Rational(s1));
    r.add_product(fb, einstein_delta(ctx, alpha, g), Rational(s2));
  }
  return r.build();
}

GctSymmetryReport verify_gct_symmetry(const MetricContext& ctx, unsigned jobs, std::vector<IndexPair> components) {
  const int n = ctx.dim();
  if (components.empty()) {
    if (n <= 3) {
      components = ctx.pairs();
    } else {
      components = {{1, 1}};
    }
  }
  GctSymmetryReport out;
  out.report = ProofReport{"general coordinate transformations", n, {}};
  const VectorField vf = gct_generator(ctx);
  const ProlongationTables tables(ctx, vf, Route::Expanded, jobs);
  std::vector<Expr> comps(components.size());
  parallel_for(components.size(), jobs, [&](std::size_t i) {
    comps[i] = prolong_einstein_component(ctx, tables, components[i].first, components[i].second);
  });
  ProlongedAction act{n, SymmetricArray<Expr>(n)};
  for (std::size_t i = 0; i < components.size(); ++i) act.action.at(components[i].first, components[i].second) = comps[i];

  std::string tried;
  for (auto [s1, s2] : std::array<std::pair<int, int>, 4>{{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}}) {
    std::vector<char> ok(components.size(), 0);
    parallel_for(components.size(), jobs, [&](std::size_t i) {
      ok[i] = is_zero_mod_inverse(ctx, gct_residual(ctx, act, components[i].first, components[i].second, s1, s2));
    });
    if (std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; })) {
      out.signs = {s1, s2};
      break;
    }
    tried += (tried.empty() ? "" : ", ") + std::to_string(s1) + "/" + std::to_string(s2);
  }
  std::vector<std::string> labels;
  for (auto [a, b] : components) labels.push_back("D" + index_label({a, b}));
  ProofStep s = make_step("pr v[D_ab] + s1 d_a f^g D_gb + s2 d_b f^g D_ag = 0", "(58)", out.signs.has_value(), Expr());
  s.constraints_used = labels;
  if (out.signs) {
    s.detail = "s1 = " + std::to_string(out.signs->first) + ", s2 = " + std::to_string(out.signs->second) +
               ", exact inverse, " + std::to_string(components.size()) + " components";
  } else {
    s.detail = "no sign combination vanishes (tried " + tried + ")";
    s.residual_hash = residual_hash(gct_residual(ctx, act, components[0].first, components[0].second, 1, 1));
  }
  out.report.add(std::move(s));
  return out;
}

ProofReport verify_scaling(const MetricContext& ctx, bool lambda_zero, unsigned jobs) {
  const int n = ctx.dim();
  ProofReport rep{"uniform rescaling of the metric", n, {}};
  const VectorField vf = scaling_generator(ctx);
  const ProlongationTables tables(ctx, vf, Route::Expanded, jobs);
  const auto& pairs = ctx.pairs();
  std::vector<Expr> ricci_res(pairs.size());
  std::vector<Expr> delta_res(pairs.size());
  std::vector<Expr> action(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto [a, b] = pairs[i];
    ricci_res[i] = prolong_direct(ctx, tables, ricci(ctx, a, b));
    action[i] = prolong_einstein_component(ctx, tables, a, b);
    delta_res[i] = action[i] + sym::lam() * param("A") * sym::g(a, b);
  });
  Expr r1;
  Expr r2;
  bool ok1 = true;
  bool ok2 = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!is_zero_mod_inverse(ctx, ricci_res[i])) {
      ok1 = false;
      r1 += ricci_res[i];
    }
    if (!is_zero_mod_inverse(ctx, delta_res[i])) {
      ok2 = false;
      r2 += delta_res[i];
    }
  }
  rep.add(make_step("pr v[R_ab] = 0", "(57)", ok1, r1, std::to_string(pairs.size()) + " components"));
  rep.add(make_step("pr v[D_ab] = -lam A g_ab", "(57)", ok2, r2));
  if (lambda_zero) {
    Expr r3;
    const std::map<VarId, Expr> zero{{var::lambda(), Expr()}};
    for (const Expr& e : action) {
      const Expr z = substitute(e, zero);
      if (!is_zero_mod_inverse(ctx, z)) r3 += z;
    }
    rep.add(make_step("rescaling is a symmetry when lam = 0", "(57)", r3.is_zero(), r3));
  } else {
    std::vector<Expr> eqs;
    for (auto [a, b] : pairs) eqs.push_back(sym::lam() * param("A") * sym::g(a, b));
    const LinearSystem sys = linear_system(eqs, {var::param("A")});
    ProofStep s = make_step("rescaling requires A = 0 when lam != 0", "(57)", sys.echelon.full_rank(),
                            sys.echelon.full_rank() ? Expr() : param("A"), "rank " + std::to_string(sys.echelon.rank()));
    s.atoms_eliminated = {"p[A]"};
    rep.add(std::move(s));
  }
  return rep;
}

ProofReport ansatz_collapse(const MetricContext& ctx, unsigned jobs) {
  const int n = ctx.dim();
  ProofReport rep{"vertical part under the algebra property", n, {}};
  const VectorField vt = vertical_field(ctx);
  const SymmetricArray<Expr> bracket = bracket_with_gct(ctx, vt);
  {
    const SymmetricArray<Expr> formula = vertical_gct_bracket_formula(ctx);
    Expr residual;
    for (auto [m, nu] : ctx.pairs()) residual += bracket.at(m, nu) - formula.at(m, nu);
    rep.add(make_step("bracket with the coordinate generator", "(62)", residual.is_zero(), residual));
  }
  // F_mn may depend on x and g_mn only.
  std::vector<Expr> eqs;
  std::vector<VarId> own;
  std::vector<VarId> second;
  for (auto [m, nu] : ctx.pairs()) {
    own.push_back(func_expr(FuncKind::PhiTilde, m, nu, {}, {{m, nu}}).leading().mono.factors()[0].var);
    second.push_back(func_expr(FuncKind::PhiTilde, m, nu, {}, {{m, nu}, {m, nu}}).leading().mono.factors()[0].var);
    for (auto [k, l] : ctx.pairs()) {
      if (IndexPair{k, l} == IndexPair{m, nu}) continue;
      for (Expr& c : split_by_f(partial_g(ctx, bracket.at(m, nu), k, l))) eqs.push_back(std::move(c));
    }
  }
  const std::size_t first_count = eqs.size();
  for (std::size_t i = 0; i < first_count; ++i) {
    for (auto [k, l] : ctx.pairs()) {
      Expr d = partial_g(ctx, eqs[i], k, l);
      if (!d.is_zero()) eqs.push_back(std::move(d));
    }
  }
  std::vector<VarId> unknowns = own;
  unknowns.insert(unknowns.end(), second.begin(), second.end());
  bool ok = true;
  std::string detail;
  try {
    const LinearSystem sys = linear_system(eqs, unknowns);
    const auto kernel = sys.echelon.kernel();
    ok = kernel.size() == 1;
    if (ok) {
      const auto& v = kernel.front();
      for (std::size_t i = 0; i < own.size(); ++i) ok = ok && v[i] == v[0] && v[0] != Rational(0);
      for (std::size_t i = own.size(); i < v.size(); ++i) ok = ok && v[i] == Rational(0);
    }
    detail = std::to_string(first_count) + " conditions, closure " + std::to_string(eqs.size()) + ", kernel dimension " +
             std::to_string(kernel.size());
  } catch (const std::invalid_argument& e) {
    ok = false;
    detail = e.what();
  }
  {
    ProofStep s = make_step("own metric derivatives equal and second ones vanish", "(70)", ok, Expr(), detail);
    s.constraints_used = {"(64)", "(66)"};
    rep.add(std::move(s));
  }
  {
    const SymmetricArray<Expr> f = bracket_with_gct(ctx, ansatz_vertical(ctx, atom(var::A()), b_atoms(ctx)));
    Expr residual;
    for (auto [m, nu] : ctx.pairs()) {
      for (auto [k, l] : ctx.pairs()) {
        if (IndexPair{k, l} != IndexPair{m, nu}) residual += partial_g(ctx, f.at(m, nu), k, l);
      }
    }
    rep.add(make_step("A g + B keeps the bracket on the own component", "(70)", residual.is_zero(), residual));
  }
  std::vector<Expr> shift;
  substitution_steps(ctx, jobs, rep, shift);
  if (n < 3) return rep;

  const SymmetricArray<Expr> bm = b_atoms(ctx);
  std::vector<Expr> comb_targets;
  for (int a = 1; a <= n; ++a) {
    for (int b = a; b <= n; ++b) {
      for (int r = 1; r <= n; ++r) comb_targets.push_back(b_combination(bm, a, b, r));
    }
  }
  rep.add(implied_step("inverse components are independent", "(75)", shift, comb_targets, {"(73)"}));
  {
    // C_{r;ab} + C_{a;br} = 2 d_b B_ra
    Expr residual;
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        for (int r = 1; r <= n; ++r) {
          residual += b_combination(bm, a, b, r) + b_combination(bm, b, r, a) - Expr(2L) * partial_x(bm.at(r, a), b);
        }
      }
    }
    rep.add(make_step("cyclic combination", "(76)", residual.is_zero(), residual));
  }
  std::vector<Expr> dx_targets;
  for (auto [m, nu] : ctx.pairs()) {
    for (int b = 1; b <= n; ++b) dx_targets.push_back(partial_x(bm.at(m, nu), b));
  }
  rep.add(implied_step("B is constant", "(76)", comb_targets, dx_targets, {"(75)"}));

  // With constant A and B, the bracket must again be constant in x.
  const SymmetricArray<Expr> bp = b_params(ctx);
  const SymmetricArray<Expr> f = bracket_with_gct(ctx, ansatz_vertical(ctx, param("A"), bp));
  bool free = true;
  std::vector<Expr> conds;
  for (const Expr& e : f.values()) {
    free = free && metric_free(e);
    for (int a = 1; a <= n; ++a) {
      for (Expr& c : split_by_f(partial_x(e, a))) conds.push_back(std::move(c));
    }
  }
  rep.add(make_step("bracket of the constant ansatz carries no metric", "(77)", free, Expr()));
  const LinearSystem sys = linear_system(conds, vars_of(bp));
  ProofStep s = make_step("bracket stays in the algebra only for B = 0", "(77)", sys.echelon.full_rank(), Expr(),
                          std::to_string(conds.size()) + " conditions, rank " + std::to_string(sys.echelon.rank()) +
                              " of " + std::to_string(sys.echelon.cols()));
  s.atoms_eliminated = names_of(bp.values());
  rep.add(std::move(s));
  return rep;
}

SymmetricArray<Expr> two_dim_b_family() {
  const Expr x1 = sym::x(1);
  const Expr x2 = sym::x(2);
  SymmetricArray<Expr> b(2);
  b.at(1, 2) = param("a") * x1 * x2 + param("b") * x1 + param("c") * x2 + param("d");
  b.at(1, 1) = param("a") * x2 * x2 + Expr(2L) * param("b") * x2 + param("f");
  b.at(2, 2) = param("a") * x1 * x1 + Expr(2L) * param("c") * x1 + param("g");
  return b;
}

ProofReport two_dim_branch(unsigned jobs) {
  const MetricContext ctx(2);
  ProofReport rep{"two-dimensional branch", 2, {}};
  std::vector<Expr> shift;
  substitution_steps(ctx, jobs, rep, shift);
  const SymmetricArray<Expr> bm = b_atoms(ctx);

  std::vector<Expr> two_dim_targets;
  for (int a = 1; a <= 2; ++a) {
    for (int r = 1; r <= 2; ++r) two_dim_targets.push_back(two_dim_combination(bm, a, r));
  }
  rep.add(implied_step("only alpha = beta survives", "(78)", shift, two_dim_targets, {"(73)"}));
  rep.add(implied_step("diagonal components", "(79)", two_dim_targets,
                       {partial_x(bm.at(1, 1), 1), partial_x(bm.at(2, 2), 2)}, {"(78)"}));
  {
    const Expr r = (two_dim_combination(bm, 1, 2) - (Expr(2L) * partial_x(bm.at(1, 2), 1) - partial_x(bm.at(1, 1), 2))) +
                   (two_dim_combination(bm, 2, 1) - (Expr(2L) * partial_x(bm.at(1, 2), 2) - partial_x(bm.at(2, 2), 1)));
    rep.add(make_step("off-diagonal relations", "(80)", r.is_zero(), r));
  }
  {
    std::vector<Expr> eqs = two_dim_targets;
    for (const Expr& e : two_dim_targets) {
      for (int a = 1; a <= 2; ++a) eqs.push_back(partial_x(e, a));
    }
    rep.add(implied_step("second derivatives of B_12", "(81)", eqs,
                         {partial_x(partial_x(bm.at(1, 2), 1), 1), partial_x(partial_x(bm.at(1, 2), 2), 2)},
                         {"(79)", "(80)"}));
  }
  const SymmetricArray<Expr> fam = two_dim_b_family();
  const std::vector<VarId> consts{var::param("a"), var::param("b"), var::param("c"),
                                  var::param("d"), var::param("f"), var::param("g")};
  {
    Expr r;
    for (int a = 1; a <= 2; ++a) {
      for (int rr = 1; rr <= 2; ++rr) r += two_dim_combination(fam, a, rr);
    }
    // Every polynomial solution of degree <= 3 lies in the family.
    std::vector<Monomial> monos;
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; i + j <= 3; ++j) {
        Monomial m;
        if (i > 0) m = m * Monomial(var::coord(1), i);
        if (j > 0) m = m * Monomial(var::coord(2), j);
        monos.push_back(m);
      }
    }
    SymmetricArray<Expr> gen(2);
    std::vector<VarId> coeffs;
    int slot = 0;
    for (auto [m, nu] : ctx.pairs()) {
      ++slot;
      ExprBuilder e;
      for (std::size_t k = 0; k < monos.size(); ++k) {
        const VarId c = var::param("c", slot, static_cast<int>(k + 1));
        coeffs.push_back(c);
        e.add_product(atom(c), monos[k], Rational(1));
      }
      gen.at(m, nu) = e.build();
    }
    std::vector<Expr> eqs;
    for (int a = 1; a <= 2; ++a) {
      for (int rr = 1; rr <= 2; ++rr) eqs.push_back(two_dim_combination(gen, a, rr));
    }
    const LinearSystem sys = linear_system(eqs, coeffs);
    const std::size_t kdim = sys.echelon.cols() - sys.echelon.rank();
    // the family's own coordinates in the monomial basis
    RowEchelon famrank(coeffs.size());
    for (VarId k : consts) {
      std::map<VarId, Expr> pick;
      for (VarId o : consts) pick.emplace(o, Expr(o == k ? 1L : 0L));
      RationalRow row(coeffs.size());
      std::size_t col = 0;
      for (auto [m, nu] : ctx.pairs()) {
        const Expr p = substitute(fam.at(m, nu), pick);
        for (const Monomial& mono : monos) {
          for (const Term& t : p.terms()) {
            if (t.mono == mono) row[col] = t.coeff;
          }
          ++col;
        }
      }
      famrank.insert(std::move(row));
    }
    const bool ok = r.is_zero() && kdim == 6 && famrank.rank() == 6;
    const std::string detail = "solution space of degree <= 3 has dimension " + std::to_string(kdim) +
                               ", family rank " + std::to_string(famrank.rank());
    ProofStep off = make_step("closed polynomial form of B_12", "(82)", ok, r, detail);
    off.constraints_used = {"(81)"};
    rep.add(std::move(off));
    ProofStep s = make_step("closed polynomial form of B_11, B_22", "(83)", ok, r, detail);
    s.constraints_used = {"(78)", "(82)"};
    rep.add(std::move(s));
  }
  {
    // The bracket with a coordinate generator has to satisfy the same equation.
    const SymmetricArray<Expr> f = bracket_with_gct(ctx, ansatz_vertical(ctx, param("A"), fam));
    bool free = true;
    std::vector<Expr> conds;
    for (const Expr& e : f.values()) free = free && metric_free(e);
    for (int a = 1; a <= 2; ++a) {
      for (int rr = 1; rr <= 2; ++rr) {
        for (Expr& c : split_by_f(two_dim_combination(f, a, rr))) conds.push_back(std::move(c));
      }
    }
    rep.add(make_step("bracket of the ansatz carries no metric", "(83)", free, Expr()));
    const LinearSystem sys = linear_system(conds, consts);
    ProofStep s = make_step("bracket stays in the algebra only for B = 0", "(83)", sys.echelon.full_rank(), Expr(),
                            "rank " + std::to_string(sys.echelon.rank()) + " of 6");
    s.atoms_eliminated = {"p[a]", "p[b]", "p[c]", "p[d]", "p[f]", "p[g]"};
    rep.add(std::move(s));
  }
  return rep;
}

Certificate final_classification(const MetricContext& ctx, LambdaMode mode, unsigned jobs) {
  const int n = ctx.dim();
  if (n < 2 || !ctx.has_exact_inverse()) throw std::invalid_argument("final_classification: dimension out of range");
  Certificate cert;
  cert.dim = n;
  cert.lambda = mode;
  cert.report = ProofReport{"symmetry classification", n, {}};
  cert.report.append(deduce_h_independence(ctx, jobs), "h: ");
  cert.report.append(deduce_phi_structure(ctx, jobs), "phi: ");
  cert.report.append(deduce_dg(ctx, jobs), "dg: ");
  cert.report.append(verify_gct_symmetry(ctx, jobs).report, "gct: ");
  cert.report.append(n == 2 ? two_dim_branch(jobs) : ansatz_collapse(ctx, jobs), "ansatz: ");
  const ProofReport scaling = verify_scaling(ctx, mode == LambdaMode::Zero, jobs);
  cert.report.append(scaling, "scaling: ");
  cert.generators = {"GCT"};
  if (mode == LambdaMode::Zero) {
    cert.generators.push_back("scaling");
    cert.phi_tilde = "p[A]*g[mu,nu]";
  } else {
    cert.phi_tilde = "0";
  }
  return cert;
}

nlohmann::json to_json(const Certificate& cert) {
  nlohmann::json steps = nlohmann::json::array();
  for (const ProofStep& s : cert.report.steps) {
    steps.push_back({{"name", s.name},
                     {"paper_eq", s.paper_eq},
                     {"status", s.passed ? "pass" : "fail"},
                     {"residual_hash", s.residual_hash}});
  }
  return {{"schema", 1},
          {"dim", cert.dim},
          {"lambda", cert.lambda == LambdaMode::Zero ? "0" : "sym"},
          {"status", cert.passed() ? "pass" : "fail"},
          {"generators", cert.generators},
          {"phi_tilde", cert.phi_tilde},
          {"steps", steps}};
}

}  // namespace einsym
