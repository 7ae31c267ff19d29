#include "einsym/determining.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <tuple>
#include <unordered_map>

#include "einsym/geometry.hpp"
#include "einsym/parallel.hpp"
#include "einsym/serialize.hpp"

namespace einsym {
namespace {

constexpr std::array<std::pair<TermClass, std::string_view>, 6> kClassNames{{
    {TermClass::None, "NONE"},
    {TermClass::DG, "DG"},
    {TermClass::DG_DG, "DG_DG"},
    {TermClass::DG_DG_DG, "DG_DG_DG"},
    {TermClass::DDG, "DDG"},
    {TermClass::DG_DDG, "DG_DDG"},
}};

Expr func_expr(FuncKind kind, int i, int j, std::vector<int> xs, std::vector<IndexPair> gs) {
  FuncAtom f;
  f.kind = kind;
  f.i = i;
  f.j = j;
  f.xs = std::move(xs);
  f.gs = std::move(gs);
  return Expr::variable(var::func(f));
}

Expr delta(int a, int b) { return kronecker(a, b); }

}  // namespace

std::string_view class_name(TermClass c) {
  for (const auto& [k, name] : kClassNames) {
    if (k == c) return name;
  }
  return "?";
}

std::optional<TermClass> class_from_name(std::string_view name) {
  for (const auto& [k, n] : kClassNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::map<TermClass, Expr> classify(const Expr& p) {
  std::map<TermClass, std::vector<Term>> parts;
  for (const Term& t : p.terms()) {
    unsigned d1 = 0;
    unsigned d2 = 0;
    for (const Factor& f : t.mono.factors()) {
      const VarKind k = var::kind(f.var);
      if (k == VarKind::D1) d1 += f.exp;
      if (k == VarKind::D2) d2 += f.exp;
      if (k == VarKind::D3) throw UnexpectedTermError("third-order atom in " + t.mono.str());
    }
    TermClass c;
    if (d2 == 0 && d1 <= 3) {
      static constexpr std::array<TermClass, 4> by_d1{TermClass::None, TermClass::DG, TermClass::DG_DG,
                                                      TermClass::DG_DG_DG};
      c = by_d1[d1];
    } else if (d2 == 1 && d1 == 0) {
      c = TermClass::DDG;
    } else if (d2 == 1 && d1 == 1) {
      c = TermClass::DG_DDG;
    } else {
      throw UnexpectedTermError("monomial matches no term class: " + t.mono.str());
    }
    parts[c].push_back(t);
  }
  std::map<TermClass, Expr> out;
  for (auto& [c, terms] : parts) out.emplace(c, Expr::from_terms(std::move(terms)));
  return out;
}

Expr h_dg(int eta, int mu, int nu) { return func_expr(FuncKind::H, eta, 0, {}, {canonical_pair(mu, nu)}); }
Expr h_dx(int eta, int alpha) { return func_expr(FuncKind::H, eta, 0, {alpha}, {}); }
Expr phi_dg(int a, int b, int mu, int nu) {
  const auto [i, j] = canonical_pair(a, b);
  return func_expr(FuncKind::Phi, i, j, {}, {canonical_pair(mu, nu)});
}
Expr phi_dx(int a, int b, int alpha) {
  const auto [i, j] = canonical_pair(a, b);
  return func_expr(FuncKind::Phi, i, j, {alpha}, {});
}

std::vector<VarId> h_dg_atoms(const MetricContext& ctx) {
  std::vector<VarId> out;
  for (int eta = 1; eta <= ctx.dim(); ++eta) {
    for (auto [m, n] : ctx.pairs()) out.push_back(h_dg(eta, m, n).leading().mono.factors()[0].var);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VarId> dg_ddg_atoms(const MetricContext& ctx) {
  std::set<VarId> out;
  for (int s = 1; s <= ctx.dim(); ++s) {
    for (int r = 1; r <= ctx.dim(); ++r) out.insert(var::d2(s, s, r, s));
  }
  return {out.begin(), out.end()};
}

std::vector<VarId> ddg_diag_atoms(const MetricContext& ctx) {
  std::set<VarId> out;
  for (int s = 1; s <= ctx.dim(); ++s) {
    for (int e = 1; e <= ctx.dim(); ++e) out.insert(canon(ctx, VarKind::D2, {s, e, s, s}));
  }
  return {out.begin(), out.end()};
}

std::vector<VarId> ddg_offdiag_atoms(const MetricContext& ctx) {
  std::set<VarId> out;
  for (int s = 1; s <= ctx.dim(); ++s) {
    for (int r = 1; r <= ctx.dim(); ++r) {
      if (r != s) out.insert(var::d2(s, s, r, s));
    }
  }
  return {out.begin(), out.end()};
}

DeterminingSystem extract_dg_ddg(const MetricContext& ctx, unsigned jobs) {
  const int n = ctx.dim();
  const ProlongedAction act = prolong_einstein(ctx, generic_field(ctx), jobs);
  DeterminingSystem sys{n, TermClass::DG_DDG, {}};
  const auto& pairs = ctx.pairs();
  std::vector<std::vector<Constraint>> per_component(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto [a, b] = pairs[i];
    const Expr part = classify(act.at(a, b))[TermClass::DG_DDG];
    const CoefficientMap coeffs =
        coefficients(part, [](VarId v) { return var::kind(v) == VarKind::D1 || var::kind(v) == VarKind::D2; });
    std::map<Monomial, const Expr*, bool (*)(const Monomial&, const Monomial&)> lookup(
        [](const Monomial& x, const Monomial& y) { return grlex_compare(x, y) < 0; });
    for (const auto& [m, c] : coeffs) lookup.emplace(m, &c);
    for (int g = 1; g <= n; ++g) {
      for (auto [mu, nu] : pairs) {
        for (int r = 1; r <= n; ++r) {
          for (int s = 1; s <= n; ++s) {
            const Monomial key = Monomial(var::d1(g, mu, nu)) * Monomial(var::d2(s, s, r, s));
            auto it = lookup.find(key);
            per_component[i].push_back(Constraint{TermClass::DG_DDG,
                                                  {a, b, g, mu, nu, r, s},
                                                  it == lookup.end() ? Expr() : *it->second,
                                                  "(30)"});
          }
        }
      }
    }
  });
  for (auto& v : per_component) {
    for (auto& c : v) sys.constraints.push_back(std::move(c));
  }
  std::sort(sys.constraints.begin(), sys.constraints.end(),
            [](const Constraint& x, const Constraint& y) { return x.indices < y.indices; });
  return sys;
}

Expr dg_ddg_formula(const MetricContext& ctx, int alpha, int beta, int gamma, int mu, int nu, int rho, int sigma) {
  const int s = sigma;
  auto xm = [&](int a, int b, int k, int l) { return x_symbol_mixed(ctx, a, b, k, l); };
  auto x1 = [&](int a, int nn, int k, int l) { return x_symbol_one_lowered(ctx, a, nn, k, l); };
  auto G = [&](int a, int b) { return g_cap_symbol(ctx, a, b); };
  const Expr first = Expr(2L) * sym::gi(gamma, s) * xm(alpha, beta, rho, s) +
                     (delta(alpha, gamma) * delta(beta, s) + delta(alpha, s) * delta(beta, gamma)) * G(rho, s) -
                     delta(beta, s) * x1(alpha, gamma, rho, s) - delta(beta, gamma) * x1(alpha, s, rho, s) -
                     delta(alpha, s) * x1(beta, gamma, rho, s) - delta(alpha, gamma) * x1(beta, s, s, rho);
  const Expr second = sym::gi(s, s) * xm(alpha, beta, mu, nu) + delta(alpha, s) * delta(beta, s) * G(mu, nu) -
                      delta(beta, s) * x1(alpha, s, mu, nu) - delta(alpha, s) * x1(beta, s, nu, mu);
  return first * h_dg(s, mu, nu) + second * h_dg(gamma, rho, s);
}

}  // namespace einsym

namespace einsym {
namespace {

using CoeffIndex = std::unordered_map<Monomial, Expr, MonomialHash>;

CoeffIndex jet_coefficients(const Expr& part) {
  CoeffIndex out;
  for (auto& [m, c] : coefficients(part, [](VarId v) { return is_jet_derivative(v); })) out.emplace(m, c);
  return out;
}

Expr lookup(const CoeffIndex& idx, const Monomial& key) {
  auto it = idx.find(key);
  return it == idx.end() ? Expr() : it->second;
}

// Every H atom carrying a metric derivative, mapped to zero.
std::map<VarId, Expr> zero_h_metric_derivatives(const std::vector<Expr>& exprs) {
  std::map<VarId, Expr> out;
  for (VarId v : function_atoms(exprs)) {
    const FuncAtom f = var::func_atom(v);
    if (f.kind == FuncKind::H && !f.gs.empty()) out.emplace(v, Expr());
  }
  return out;
}

std::map<VarId, Expr> zero_map(const std::set<VarId>& atoms) {
  std::map<VarId, Expr> out;
  for (VarId v : atoms) out.emplace(v, Expr());
  return out;
}

VarId atom_of(const Expr& single) { return single.leading().mono.factors()[0].var; }

std::vector<std::string> labels_of(const std::vector<const Constraint*>& cs) {
  std::vector<std::string> out;
  if (cs.size() > 32) {
    out.push_back(std::to_string(cs.size()) + " instances");
    return out;
  }
  for (const Constraint* c : cs) out.push_back(c->source + index_label(c->indices));
  return out;
}

std::vector<std::string> names_of(const std::vector<Expr>& atoms) {
  std::vector<std::string> out;
  for (const Expr& a : atoms) out.push_back(to_text(a));
  return out;
}

void sort_constraints(DeterminingSystem& sys) {
  std::sort(sys.constraints.begin(), sys.constraints.end(), [](const Constraint& x, const Constraint& y) {
    return std::tie(x.source, x.indices) < std::tie(y.source, y.indices);
  });
}

// Substitutes `rules` into each instance and checks that every target is a
// linear consequence of the results.
ProofStep implication_step(std::string name, std::string label, const std::vector<const Constraint*>& instances,
                           const std::map<VarId, Expr>& rules, const std::vector<Expr>& targets) {
  ProofStep step;
  step.name = std::move(name);
  step.paper_eq = std::move(label);
  step.constraints_used = labels_of(instances);
  step.atoms_eliminated = names_of(targets);
  if (targets.empty()) {
    step.passed = true;
    step.detail = "no instances in this dimension";
    step.residual_hash = residual_hash(Expr());
    return step;
  }
  std::vector<Expr> eqs;
  for (const Constraint* c : instances) {
    Expr r = rules.empty() ? c->expr : substitute(c->expr, rules);
    if (!r.is_zero()) eqs.push_back(std::move(r));
  }
  const SpanCheck chk = implied(eqs, targets);
  step.passed = chk.ok;
  step.detail = std::to_string(eqs.size()) + " equations, " + std::to_string(chk.rows) + " rows, rank " +
                std::to_string(chk.rank);
  Expr missing;
  for (std::size_t i : chk.missing) missing += targets[i];
  if (!chk.ok) step.detail += ", not implied: " + to_text(missing);
  step.residual_hash = residual_hash(missing);
  return step;
}

// Every instance must vanish after substitution.
ProofStep vanishing_step(std::string name, std::string label, const std::vector<const Constraint*>& instances,
                         const std::map<VarId, Expr>& rules) {
  ProofStep step;
  step.name = std::move(name);
  step.paper_eq = std::move(label);
  step.constraints_used = labels_of(instances);
  Expr residual;
  std::string first_bad;
  for (const Constraint* c : instances) {
    Expr r = substitute(c->expr, rules);
    if (!r.is_zero() && first_bad.empty()) first_bad = c->source + index_label(c->indices);
    residual += r;
  }
  step.passed = first_bad.empty();
  step.residual_hash = residual_hash(residual);
  step.detail = instances.empty() ? "no instances in this dimension" : std::to_string(instances.size()) + " instances";
  if (!step.passed) step.detail += ", first nonzero at " + first_bad;
  return step;
}

// Finds c with a == c * b for every pair, trying small rationals.
std::optional<Rational> common_ratio(const std::vector<std::pair<Expr, Expr>>& pairs,
                                     const std::function<bool(const Expr&)>& is_zero) {
  static const std::array<Rational, 10> candidates{Rational(1),    Rational(-1),   Rational(1, 2), Rational(-1, 2),
                                                   Rational(2),    Rational(-2),   Rational(1, 4), Rational(-1, 4),
                                                   Rational(4),    Rational(-4)};
  for (const Rational& c : candidates) {
    bool all = true;
    for (const auto& [a, b] : pairs) {
      if (!is_zero(a - c * b)) {
        all = false;
        break;
      }
    }
    if (all) return c;
  }
  return std::nullopt;
}

}  // namespace

const Constraint* find_constraint(const DeterminingSystem& sys, const std::vector<int>& indices,
                                  std::string_view source) {
  for (const Constraint& c : sys.constraints) {
    if (c.indices == indices && (source.empty() || c.source == source)) return &c;
  }
  return nullptr;
}

ProofReport deduce_h_independence(const MetricContext& ctx, unsigned jobs) {
  const int n = ctx.dim();
  ProofReport rep{"metric independence of H", n, {}};
  const DeterminingSystem sys = extract_dg_ddg(ctx, jobs);
  std::vector<const Constraint*> all;
  for (const Constraint& c : sys.constraints) all.push_back(&c);

  {
    ProofStep step{"mixed-class coefficients match the closed form", "(30)", true, labels_of(all), {}, {}, {}};
    Expr residual;
    for (const Constraint* c : all) {
      const auto& i = c->indices;
      Expr diff = Expr(2L) * c->expr - dg_ddg_formula(ctx, i[0], i[1], i[2], i[3], i[4], i[5], i[6]);
      if (!diff.is_zero() && step.passed) {
        step.passed = false;
        step.detail = "mismatch at " + index_label(i);
      }
      residual += diff;
    }
    if (step.passed) step.detail = "coefficient = 1/2 closed form at all " + std::to_string(all.size()) + " tuples";
    step.residual_hash = residual_hash(residual);
    rep.add(std::move(step));
  }

  std::set<VarId> zero;
  auto eliminate = [&](std::string name, std::string label, const std::vector<const Constraint*>& inst,
                       const std::vector<Expr>& targets) {
    ProofStep step = implication_step(std::move(name), std::move(label), inst, zero_map(zero), targets);
    if (step.passed) {
      for (const Expr& t : targets) zero.insert(atom_of(t));
    }
    rep.add(std::move(step));
  };
  auto select = [&](auto pred) {
    std::vector<const Constraint*> out;
    for (const Constraint* c : all) {
      const auto& i = c->indices;
      if (pred(i[0], i[1], i[2], i[3], i[4], i[5], i[6])) out.push_back(c);
    }
    return out;
  };

  if (n >= 3) {
    const auto inst = select([](int a, int b, int g, int, int, int, int s) { return a != g && a != s && b != g && b != s; });
    ProofStep shape{"reduced shape for alpha, beta outside {gamma, sigma}", "(31)", true, labels_of(inst), {}, {}, {}};
    Expr residual;
    for (const Constraint* c : inst) {
      const auto& i = c->indices;
      const Expr want = sym::gi(i[6], i[6]) * x_symbol_mixed(ctx, i[0], i[1], i[3], i[4]) * h_dg(i[2], i[5], i[6]);
      Expr diff = Expr(2L) * c->expr - want;
      if (!diff.is_zero() && shape.passed) {
        shape.passed = false;
        shape.detail = "mismatch at " + index_label(i);
      }
      residual += diff;
    }
    if (shape.passed) shape.detail = std::to_string(inst.size()) + " instances";
    shape.residual_hash = residual_hash(residual);
    rep.add(std::move(shape));
    std::vector<Expr> targets;
    for (VarId v : h_dg_atoms(ctx)) targets.push_back(Expr::variable(v));
    eliminate("every dH/dg vanishes", "(32)", inst, targets);
  } else {
    std::vector<Expr> pair_targets;
    std::vector<Expr> cross_targets;
    for (int s = 1; s <= 2; ++s) {
      for (int r = 1; r <= s; ++r) pair_targets.push_back(h_dg(s, r, s));
      for (int g = 1; g <= 2; ++g) {
        if (g != s) cross_targets.push_back(h_dg(g, s, s));
      }
    }
    eliminate("alpha = beta != gamma = sigma", "(33)",
              select([](int a, int b, int g, int, int, int, int s) { return a == b && a != g && g == s; }), pair_targets);
    eliminate("alpha = beta != rho = sigma", "(35)",
              select([](int a, int b, int, int, int, int r, int s) { return a == b && a != r && r == s; }), cross_targets);
    eliminate("gamma = rho = 1, sigma = 2, alpha = beta = mu = nu = 1", "(32)",
              select([](int a, int b, int g, int m, int nn, int r, int s) {
                return a == 1 && b == 1 && g == 1 && m == 1 && nn == 1 && r == 1 && s == 2;
              }),
              {h_dg(1, 1, 2)});
  }

  {
    ProofStep step{"all dH/dg eliminated", "(32)", true, {}, {}, {}, {}};
    std::vector<Expr> left;
    for (VarId v : h_dg_atoms(ctx)) {
      if (!zero.contains(v)) left.push_back(Expr::variable(v));
    }
    step.passed = left.empty();
    step.atoms_eliminated = names_of([&] {
      std::vector<Expr> e;
      for (VarId v : zero) e.push_back(Expr::variable(v));
      return e;
    }());
    Expr rest;
    for (const Expr& e : left) rest += e;
    step.residual_hash = residual_hash(rest);
    if (!step.passed) step.detail = "remaining: " + to_text(rest);
    rep.add(std::move(step));
  }

  {
    std::vector<Expr> eqs;
    for (const Constraint* c : all) {
      if (!c->expr.is_zero()) eqs.push_back(c->expr);
    }
    const LinearSystem ls = linear_system(eqs, h_dg_atoms(ctx));
    ProofStep step{"whole family has only the zero solution", "(32)", ls.echelon.full_rank(), labels_of(all), {}, {}, {}};
    step.detail = std::to_string(ls.rows) + " rows, rank " + std::to_string(ls.echelon.rank()) + " of " +
                  std::to_string(ls.unknowns.size());
    step.residual_hash = residual_hash(Expr(static_cast<long>(ls.unknowns.size() - ls.echelon.rank())));
    rep.add(std::move(step));
  }
  rep.append(verify_sufficiency(ctx, Sufficiency::DgDdg, jobs));
  return rep;
}

DeterminingSystem extract_ddg(const MetricContext& ctx, unsigned jobs, DdgRoute route) {
  const int n = ctx.dim();
  const VectorField vf = generic_field(ctx, Dependence{route == DdgRoute::ZeroAfter});
  const ProlongedAction act = prolong_einstein(ctx, vf, jobs);
  DeterminingSystem sys{n, TermClass::DDG, {}};
  const auto& pairs = ctx.pairs();
  std::vector<std::vector<Constraint>> per(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto [a, b] = pairs[i];
    Expr part = classify(act.at(a, b))[TermClass::DDG];
    if (route == DdgRoute::ZeroAfter) part = substitute(part, zero_h_metric_derivatives({part}));
    const CoeffIndex idx = jet_coefficients(part);
    for (int s = 1; s <= n; ++s) {
      for (int e = 1; e <= n; ++e) {
        per[i].push_back(Constraint{TermClass::DDG, {a, b, e, s},
                                    lookup(idx, Monomial(canon(ctx, VarKind::D2, {s, e, s, s}))), "(37)"});
      }
      for (int r = 1; r <= n; ++r) {
        if (r == s) continue;
        per[i].push_back(Constraint{TermClass::DDG, {a, b, r, s}, lookup(idx, Monomial(var::d2(s, s, r, s))), "(41)"});
      }
    }
  });
  for (auto& v : per) {
    for (auto& c : v) sys.constraints.push_back(std::move(c));
  }
  sort_constraints(sys);
  return sys;
}

Expr ddg_diag_formula(const MetricContext& ctx, int alpha, int beta, int eta, int sigma) {
  const int n = ctx.dim();
  const int s = sigma;
  auto brace = [&](int b) {
    // -g^{sg} d_b^e d_g H^s - g^{se} d_b H^s - d_b^e g^{mn} dPhi_mn/dg_ss + g^{ge} dPhi_gb/dg_ss
    ExprBuilder e;
    for (int g = 1; g <= n; ++g) {
      if (b == eta) e.add_product(sym::gi(s, g), h_dx(s, g), Rational(-1));
      e.add_product(sym::gi(g, eta), phi_dg(g, b, s, s));
    }
    e.add_product(sym::gi(s, eta), h_dx(s, b), Rational(-1));
    if (b == eta) {
      for (int m = 1; m <= n; ++m) {
        for (int nn = 1; nn <= n; ++nn) e.add_product(sym::gi(m, nn), phi_dg(m, nn, s, s), Rational(-1));
      }
    }
    return e.build();
  };
  auto tail = [&](int b) {
    ExprBuilder e;
    e.add_product(sym::gi(s, s), h_dx(s, b));
    for (int g = 1; g <= n; ++g) e.add_product(sym::gi(g, s), phi_dg(g, b, s, s));
    return e.build();
  };
  ExprBuilder out;
  if (alpha == s) out.add(brace(beta));
  if (beta == s) out.add(brace(alpha));
  if (alpha == s && beta == s) {
    for (int g = 1; g <= n; ++g) out.add_product(sym::gi(g, eta), h_dx(s, g), Rational(2));
  }
  out.add_product(sym::gi(s, eta), phi_dg(alpha, beta, s, s), Rational(-2));
  if (alpha == eta) out.add(tail(beta));
  if (beta == eta) out.add(tail(alpha));
  return out.build();
}

Expr ddg_offdiag_formula(const MetricContext& ctx, int alpha, int beta, int rho, int sigma) {
  const int n = ctx.dim();
  const int s = sigma;
  const int r = rho;
  ExprBuilder out;
  if (alpha == s && beta == s) {
    for (int g = 1; g <= n; ++g) out.add_product(sym::gi(r, g), h_dx(s, g), Rational(-2));
    for (int m = 1; m <= n; ++m) {
      for (int nn = 1; nn <= n; ++nn) out.add_product(sym::gi(m, nn), phi_dg(m, nn, r, s), Rational(-1));
    }
  }
  auto brace = [&](int b) {
    ExprBuilder e;
    for (int g = 1; g <= n; ++g) {
      if (b == r) e.add_product(sym::gi(g, s), h_dx(s, g));
      e.add_product(sym::gi(g, s), phi_dg(g, b, r, s));
    }
    e.add_product(sym::gi(r, s), h_dx(s, b));
    return e.build();
  };
  if (alpha == s) out.add(brace(beta));
  if (beta == s) out.add(brace(alpha));
  if (alpha == r) out.add_product(sym::gi(s, s), h_dx(s, beta), Rational(-1));
  if (beta == r) out.add_product(sym::gi(s, s), h_dx(s, alpha), Rational(-1));
  out.add_product(sym::gi(s, s), phi_dg(alpha, beta, r, s), Rational(-1));
  return out.build();
}

std::map<VarId, Expr> phi_metric_rules(const MetricContext& ctx, const std::vector<std::string>& labels) {
  const int n = ctx.dim();
  auto want = [&](std::string_view l) { return std::find(labels.begin(), labels.end(), l) != labels.end(); };
  std::map<VarId, Expr> rules;
  auto put = [&](const Expr& atom, Expr value) {
    const VarId v = atom_of(atom);
    auto [it, fresh] = rules.emplace(v, value);
    if (!fresh && it->second != value) throw std::logic_error("conflicting rewrite rules for " + var::name(v));
  };
  for (int a = 1; a <= n; ++a) {
    for (int b = a; b <= n; ++b) {
      for (int s = 1; s <= n; ++s) {
        if (want("(38)") && a != s && b != s) put(phi_dg(a, b, s, s), Expr());
      }
    }
  }
  for (int s = 1; s <= n; ++s) {
    for (int a = 1; a <= n; ++a) {
      if (a == s) continue;
      if (want("(40)")) put(phi_dg(s, a, s, s), -h_dx(s, a));
      if (want("(44)")) put(phi_dg(a, a, a, s), Expr(-2L) * h_dx(s, a));
      for (int r = 1; r <= n; ++r) {
        if (r == a || r == s) continue;
        if (want("(43)")) put(phi_dg(a, r, r, s), -h_dx(s, a));
      }
    }
  }
  if (want("(45)")) {
    for (auto [r, s] : ctx.pairs()) {
      if (r == s) continue;
      for (auto [a, b] : ctx.pairs()) {
        if (a != r && a != s && b != r && b != s) put(phi_dg(a, b, r, s), Expr());
      }
    }
  }
  return rules;
}

Expr apply_rules(const Expr& p, const std::map<VarId, Expr>& rules) { return substitute(p, rules); }

std::string ddg_diag_case(int a, int b, int e, int s) {
  if (a != s && b != s) {
    if (a != e && b != e) return "(38)";
    if (a == b) return "(39)";
    return a == e ? "(i)" : "(ii)";
  }
  if (a == s && b == s) return e == s ? "(x)" : "(v)";
  if (a == s) {
    if (e != a && e != b) return "(iii)";
    return e == a ? "(vii)" : "(ix)";
  }
  if (e != a && e != b) return "(iv)";
  return e == b ? "(vi)" : "(viii)";
}

std::string ddg_offdiag_case(int a, int b, int, int s) {
  if (a != s && b != s) return "(42)";
  if (a == s && b == s) return "(iii)";
  return a == s ? "(i)" : "(ii)";
}

ProofReport verify_sufficiency(const MetricContext& ctx, Sufficiency which, unsigned jobs) {
  ProofReport rep{"sufficiency", ctx.dim(), {}};
  if (which == Sufficiency::DgDdg) {
    const ProlongedAction act = prolong_einstein(ctx, generic_field(ctx), jobs);
    for (TermClass cls : {TermClass::DG_DDG, TermClass::DG_DG_DG}) {
      Expr residual;
      for (const Expr& comp : act.action.values()) {
        const Expr part = classify(comp)[cls];
        residual += substitute(part, zero_h_metric_derivatives({part}));
      }
      ProofStep step;
      step.name = std::string(class_name(cls)) + " class vanishes once dH/dg = 0";
      step.paper_eq = cls == TermClass::DG_DDG ? "(27)" : "(32)";
      step.passed = residual.is_zero();
      step.residual_hash = residual_hash(residual);
      step.detail = "all " + std::to_string(act.action.values().size()) + " components";
      rep.add(std::move(step));
    }
    return rep;
  }
  const DeterminingSystem sys = extract_ddg(ctx, jobs);
  const bool diag = which == Sufficiency::DdgDiag;
  const std::string source = diag ? "(37)" : "(41)";
  const auto rules = diag ? phi_metric_rules(ctx, {"(38)", "(40)"}) : phi_metric_rules(ctx, {"(43)", "(44)", "(45)"});
  const std::vector<std::string> cases =
      diag ? std::vector<std::string>{"(38)", "(39)", "(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)", "(viii)",
                                      "(ix)", "(x)"}
           : std::vector<std::string>{"(42)", "(i)", "(ii)", "(iii)"};
  for (const std::string& cs : cases) {
    std::vector<const Constraint*> inst;
    for (const Constraint& c : sys.constraints) {
      if (c.source != source) continue;
      const auto& i = c.indices;
      const std::string label = diag ? ddg_diag_case(i[0], i[1], i[2], i[3]) : ddg_offdiag_case(i[0], i[1], i[2], i[3]);
      if (label == cs) inst.push_back(&c);
    }
    rep.add(vanishing_step("case " + cs + " vanishes", source, inst, rules));
  }
  return rep;
}

SymmetricArray<Expr> tilde_phi(const MetricContext& ctx, const VectorField& vf) {
  const int n = ctx.dim();
  SymmetricArray<Expr> out(n);
  for (auto [a, b] : ctx.pairs()) {
    ExprBuilder e;
    e.add(vf.phi(a, b));
    for (int g = 1; g <= n; ++g) {
      e.add_product(sym::g(a, g), partial_x(vf.h(g), b));
      e.add_product(sym::g(g, b), partial_x(vf.h(g), a));
    }
    out.at(a, b) = e.build();
  }
  return out;
}

ProofReport deduce_phi_structure(const MetricContext& ctx, unsigned jobs) {
  const int n = ctx.dim();
  ProofReport rep{"second-derivative analysis", n, {}};
  const DeterminingSystem sys = extract_ddg(ctx, jobs);

  {
    const DeterminingSystem other = extract_ddg(ctx, jobs, DdgRoute::ZeroAfter);
    ProofStep step{"zeroing dH/dg before or after classification agrees", "(32)", true, {}, {}, {}, {}};
    Expr residual;
    for (std::size_t i = 0; i < sys.constraints.size(); ++i) residual += sys.constraints[i].expr - other.constraints[i].expr;
    step.passed = residual.is_zero() && sys.constraints.size() == other.constraints.size();
    step.residual_hash = residual_hash(residual);
    step.detail = std::to_string(sys.constraints.size()) + " constraints";
    rep.add(std::move(step));
  }

  for (const std::string source : {"(37)", "(41)"}) {
    std::vector<const Constraint*> inst;
    std::vector<std::pair<Expr, Expr>> eq_pairs;
    std::vector<std::pair<Expr, Expr>> diag_pairs;
    for (const Constraint& c : sys.constraints) {
      if (c.source != source) continue;
      inst.push_back(&c);
      const auto& i = c.indices;
      Expr f = source == "(37)" ? ddg_diag_formula(ctx, i[0], i[1], i[2], i[3])
                                : ddg_offdiag_formula(ctx, i[0], i[1], i[2], i[3]);
      (source == "(37)" && i[2] == i[3] ? diag_pairs : eq_pairs).emplace_back(c.expr, std::move(f));
    }
    auto exact = [](const Expr& e) { return e.is_zero(); };
    const auto r1 = common_ratio(eq_pairs, exact);
    const auto r2 = diag_pairs.empty() ? std::optional<Rational>(Rational(1)) : common_ratio(diag_pairs, exact);
    ProofStep step{"coefficients match the closed form", source, r1 && r2, labels_of(inst), {}, {}, {}};
    step.residual_hash = residual_hash(Expr());
    if (r1) step.detail = "coefficient = " + r1->str() + " closed form";
    if (r2 && !diag_pairs.empty()) step.detail += "; " + r2->str() + " on d_s d_s g_ss";
    if (!step.passed) step.detail = "no constant ratio to the closed form";
    rep.add(std::move(step));
  }

  auto select = [&](const std::string& source, const std::string& label) {
    std::vector<const Constraint*> out;
    for (const Constraint& c : sys.constraints) {
      if (c.source != source) continue;
      const auto& i = c.indices;
      const std::string l = source == "(37)" ? ddg_diag_case(i[0], i[1], i[2], i[3]) : ddg_offdiag_case(i[0], i[1], i[2], i[3]);
      if (l == label) out.push_back(&c);
    }
    return out;
  };

  std::vector<Expr> off_targets;
  std::vector<Expr> diag_targets;
  std::vector<Expr> mixed_targets;
  std::vector<Expr> equal_targets;
  std::vector<Expr> outside_targets;
  for (int s = 1; s <= n; ++s) {
    for (int a = 1; a <= n; ++a) {
      for (int b = a; b <= n; ++b) {
        if (a != s && b != s) off_targets.push_back(phi_dg(a, b, s, s));
      }
      if (a == s) continue;
      diag_targets.push_back(h_dx(s, a) + phi_dg(s, a, s, s));
      equal_targets.push_back(Expr(2L) * h_dx(s, a) + phi_dg(a, a, a, s));
      for (int r = 1; r <= n; ++r) {
        if (r != a && r != s) mixed_targets.push_back(h_dx(s, a) + phi_dg(a, r, r, s));
      }
    }
  }
  for (auto [r, s] : ctx.pairs()) {
    if (r == s) continue;
    for (auto [a, b] : ctx.pairs()) {
      if (a != r && a != s && b != r && b != s) outside_targets.push_back(phi_dg(a, b, r, s));
    }
  }
  rep.add(implication_step("alpha != sigma != beta, alpha != eta != beta", "(38)", select("(37)", "(38)"), {}, off_targets));
  rep.add(implication_step("alpha = beta = eta != sigma", "(40)", select("(37)", "(39)"),
                           phi_metric_rules(ctx, {"(38)"}), diag_targets));
  const auto offdiag_inst = select("(41)", "(42)");
  rep.add(implication_step("rho = beta != alpha", "(43)", offdiag_inst, {}, mixed_targets));
  rep.add(implication_step("rho = alpha = beta", "(44)", offdiag_inst, {}, equal_targets));
  rep.add(implication_step("alpha, beta outside {rho, sigma}", "(45)", offdiag_inst, {}, outside_targets));

  rep.append(verify_sufficiency(ctx, Sufficiency::DdgDiag, jobs), "(37) ");
  rep.append(verify_sufficiency(ctx, Sufficiency::DdgOffdiag, jobs), "(41) ");

  // PhiT depends on its own metric component only.
  const VectorField vf = generic_field(ctx, Dependence{false});
  const SymmetricArray<Expr> pt = tilde_phi(ctx, vf);
  const auto rules = phi_metric_rules(ctx, {"(38)", "(40)", "(43)", "(44)", "(45)"});
  std::map<std::string, std::pair<std::size_t, Expr>> by_label;
  for (const char* l : {"(47)", "(48)", "(49)", "(50)", "(51)"}) by_label[l] = {0, Expr()};
  for (auto [a, b] : ctx.pairs()) {
    for (auto [r, s] : ctx.pairs()) {
      if (canonical_pair(a, b) == canonical_pair(r, s)) continue;
      std::string label;
      if (r == s) {
        label = (a != s && b != s) ? "(47)" : "(48)";
      } else {
        const bool share_a = a == r || a == s;
        const bool share_b = b == r || b == s;
        if (!share_a && !share_b) label = "(51)";
        else if (a == b) label = "(50)";
        else label = "(49)";
      }
      auto& [count, residual] = by_label[label];
      ++count;
      residual += apply_rules(partial_g(ctx, pt.at(a, b), r, s, vf.dep), rules);
    }
  }
  for (auto& [label, entry] : by_label) {
    ProofStep step;
    step.name = "dPhiT/dg vanishes off its own component";
    step.paper_eq = label;
    step.passed = entry.second.is_zero();
    step.residual_hash = residual_hash(entry.second);
    step.detail = entry.first == 0 ? "no instances in this dimension" : std::to_string(entry.first) + " instances";
    rep.add(std::move(step));
  }
  return rep;
}

VectorField reduced_field(const MetricContext& ctx) {
  const int n = ctx.dim();
  VectorField vf(n);
  vf.dep.h_on_metric = false;
  for (int e = 1; e <= n; ++e) vf.H[e - 1] = Expr::variable(var::f(e));
  for (auto [a, b] : ctx.pairs()) {
    ExprBuilder e;
    e.add(Expr::variable(var::PhiTilde(a, b)));
    for (int g = 1; g <= n; ++g) {
      e.add_product(sym::g(a, g), partial_x(vf.h(g), b), Rational(-1));
      e.add_product(sym::g(g, b), partial_x(vf.h(g), a), Rational(-1));
    }
    vf.Phi.at(a, b) = e.build();
  }
  return vf;
}

DeterminingSystem extract_dg(const MetricContext& ctx, const VectorField& vf, unsigned jobs) {
  const int n = ctx.dim();
  const ProlongedAction act = prolong_einstein(ctx, vf, jobs);
  DeterminingSystem sys{n, TermClass::DG, {}};
  const auto& pairs = ctx.pairs();
  std::vector<std::vector<Constraint>> per(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto [a, b] = pairs[i];
    const Expr part = classify(act.at(a, b))[TermClass::DG];
    const CoeffIndex idx = jet_coefficients(part);
    // d_k g_ab = Gamma_{a,bk} + Gamma_{b,ak}
    std::map<std::pair<int, IndexPair>, ExprBuilder> gamma;
    for (int l = 1; l <= n; ++l) {
      for (auto p : pairs) gamma[{l, p}];
    }
    for (int k = 1; k <= n; ++k) {
      for (auto [p, q] : pairs) {
        const Expr c = lookup(idx, Monomial(var::d1(k, p, q)));
        if (c.is_zero()) continue;
        gamma[{p, canonical_pair(q, k)}].add(c);
        gamma[{q, canonical_pair(p, k)}].add(c);
      }
    }
    for (auto& [key, builder] : gamma) {
      per[i].push_back(Constraint{TermClass::DG, {a, b, key.first, key.second.first, key.second.second},
                                  builder.build(), "(55)"});
    }
  });
  for (auto& v : per) {
    for (auto& c : v) sys.constraints.push_back(std::move(c));
  }
  sort_constraints(sys);
  return sys;
}

DeterminingSystem extract_dg(const MetricContext& ctx, unsigned jobs) { return extract_dg(ctx, reduced_field(ctx), jobs); }

Expr dg_reduced_formula(const MetricContext& ctx, int alpha, int beta, int lambda) {
  auto dpt = [](int a, int b, int x) { return func_expr(FuncKind::PhiTilde, std::min(a, b), std::max(a, b), {x}, {}); };
  ExprBuilder out;
  for (int r = 1; r <= ctx.dim(); ++r) {
    out.add_product(sym::gi(lambda, r), dpt(r, alpha, beta) + dpt(r, beta, alpha) - dpt(alpha, beta, r));
  }
  return out.build();
}

ProofReport deduce_dg(const MetricContext& ctx, unsigned jobs) {
  const int n = ctx.dim();
  ProofReport rep{"first-derivative analysis", n, {}};
  const VectorField vf = reduced_field(ctx);
  const ProlongedAction act = prolong_einstein(ctx, vf, jobs);
  {
    ProofStep step{"lower classes vanish for the reduced field", "(46)", true, {}, {}, {}, {}};
    Expr residual;
    const auto absent = ddg_diag_atoms(ctx);
    std::set<VarId> absent_set(absent.begin(), absent.end());
    for (VarId v : ddg_offdiag_atoms(ctx)) absent_set.insert(v);
    for (const Expr& comp : act.action.values()) {
      auto parts = classify(comp);
      residual += parts[TermClass::DG_DDG] + parts[TermClass::DG_DG_DG];
      for (auto& [m, c] : coefficients(parts[TermClass::DDG], [](VarId v) { return var::kind(v) == VarKind::D2; })) {
        if (absent_set.contains(m.factors()[0].var)) residual += c;
      }
    }
    step.passed = residual.is_zero();
    step.residual_hash = residual_hash(residual);
    rep.add(std::move(step));
  }
  const DeterminingSystem sys = extract_dg(ctx, vf, jobs);
  std::vector<const Constraint*> all;
  for (const Constraint& c : sys.constraints) all.push_back(&c);
  {
    ProofStep step{"Christoffel-basis coefficients generated", "(55)", true, labels_of(all), {}, {}, {}};
    for (const Constraint* c : all) {
      if (c->expr.contains_if([](VarId v) { return is_jet_derivative(v); })) step.passed = false;
    }
    step.detail = std::to_string(all.size()) + " constraints";
    step.residual_hash = residual_hash(Expr());
    rep.add(std::move(step));
  }
  std::vector<const Constraint*> inst;
  std::vector<std::pair<Expr, Expr>> pairs;
  for (const Constraint* c : all) {
    const auto& i = c->indices;
    const int a = i[0], b = i[1], l = i[2], m = i[3], nn = i[4];
    if (l == a || l == b || m == a || m == b || nn == a || nn == b) continue;
    inst.push_back(c);
    pairs.emplace_back(c->expr, g_cap_symbol(ctx, m, nn) * dg_reduced_formula(ctx, a, b, l));
  }
  {
    const auto ratio = common_ratio(pairs, [&](const Expr& e) { return is_zero_mod_inverse(ctx, e); });
    ProofStep step{"alpha != lambda != beta with mu, nu outside {alpha, beta}", "(56)", ratio.has_value(),
                   labels_of(inst), {}, {}, {}};
    step.residual_hash = residual_hash(Expr());
    step.detail = ratio ? "coefficient = " + ratio->str() + " G^{mn} times the reduced form, " +
                              std::to_string(inst.size()) + " instances"
                        : "no constant ratio";
    rep.add(std::move(step));
  }
  {
    std::set<VarId> dx;
    for (VarId v : function_atoms([&] {
           std::vector<Expr> e;
           for (const Constraint* c : all) e.push_back(c->expr);
           return e;
         }())) {
      const FuncAtom f = var::func_atom(v);
      if (f.kind == FuncKind::PhiTilde && !f.xs.empty()) dx.insert(v);
    }
    ProofStep step{"family vanishes when PhiT has no x-dependence", "(55)", true, labels_of(all), {}, {}, {}};
    Expr residual;
    const auto zero = zero_map(dx);
    for (const Constraint* c : all) {
      Expr r = substitute(c->expr, zero);
      if (!is_zero_mod_inverse(ctx, r)) {
        step.passed = false;
        residual += r;
      }
    }
    step.residual_hash = residual_hash(residual);
    rep.add(std::move(step));
  }
  {
    // Informational: what the reduced instances alone imply for the first
    // x-derivatives of PhiT. The conclusion is drawn later from the algebra.
    std::vector<Expr> eqs;
    std::vector<Expr> targets;
    for (const auto& pr : pairs) eqs.push_back(pr.second);
    for (auto [a, b] : ctx.pairs()) {
      for (int x = 1; x <= n; ++x) targets.push_back(func_expr(FuncKind::PhiTilde, a, b, {x}, {}));
    }
    const SpanCheck chk = implied(eqs, targets);
    ProofStep step{"restricted instances alone", "(56)", true, {}, {}, {}, {}};
    step.detail = std::to_string(targets.size() - chk.missing.size()) + " of " + std::to_string(targets.size()) +
                  " first x-derivatives of PhiT forced to zero (not used)";
    step.residual_hash = residual_hash(Expr(static_cast<long>(chk.missing.size())));
    rep.add(std::move(step));
  }
  return rep;
}

}  // namespace einsym
