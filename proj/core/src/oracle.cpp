#include "einsym/oracle.hpp"

#include <functional>
#include <random>
#include <set>

#include "einsym/determining.hpp"
#include "einsym/geometry.hpp"
#include "einsym/liealg.hpp"
#include "einsym/parallel.hpp"
#include "einsym/prolongation.hpp"

namespace einsym {
namespace {

using Matrix = std::vector<std::vector<Rational>>;

Rational draw(std::mt19937_64& rng, int height) {
  std::uniform_int_distribution<long> num(-height, height);
  std::uniform_int_distribution<long> den(1, height);
  const long p = num(rng);
  return {p, den(rng)};
}

// Gauss-Jordan elimination; returns det and fills inv when det != 0.
Rational invert(Matrix m, Matrix& inv) {
  const std::size_t n = m.size();
  inv.assign(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c].is_zero()) ++piv;
    if (piv == n) return Rational(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      std::swap(inv[piv], inv[c]);
      det = -det;
    }
    const Rational p = m[c][c];
    det *= p;
    const Rational ip = p.inverse();
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] *= ip;
      inv[c][k] *= ip;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c].is_zero()) continue;
      const Rational f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return det;
}

struct Check {
  std::string name;
  std::vector<Expr> cover;
  std::function<Rational(const PointAssignment&)> residual;
};

Check expr_check(std::string name, Expr e) {
  auto shared = std::make_shared<Expr>(std::move(e));
  return {std::move(name), {*shared}, [shared](const PointAssignment& pt) { return eval(*shared, pt); }};
}

std::string idx(std::initializer_list<int> is) {
  std::string s = "(";
  bool first = true;
  for (int i : is) {
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + ")";
}

void ricci_checks(const MetricContext& ctx, std::vector<Check>& out) {
  const int n = ctx.dim();
  for (auto [a, b] : ctx.pairs()) {
    auto r = std::make_shared<Expr>(ricci(ctx, a, b));
    out.push_back({"ricci vs reference " + idx({a, b}), {*r}, [&ctx, r, a, b](const PointAssignment& pt) {
                     return eval(*r, pt) - reference_ricci(ctx, pt, a, b);
                   }});
    if (ctx.has_exact_inverse()) {
      auto f = std::make_shared<FracExpr>(MetricContext(n, InverseMode::Exact).realize(*r));
      out.push_back({"ricci adjugate form " + idx({a, b}), {*r}, [&ctx, r, f](const PointAssignment& pt) {
                       return eval(*r, pt) - eval(ctx, *f, pt);
                     }});
    }
  }
  if (n == 2) {
    ExprBuilder scalar;
    for (int c = 1; c <= 2; ++c) {
      for (int d = 1; d <= 2; ++d) scalar.add_product(sym::gi(c, d), ricci(ctx, c, d));
    }
    const Expr s = scalar.build();
    for (auto [a, b] : ctx.pairs()) {
      out.push_back(expr_check("two-dimensional Einstein tensor " + idx({a, b}),
                               ricci(ctx, a, b) - Rational(1, 2) * sym::g(a, b) * s));
    }
  }
}

void dricci_checks(const MetricContext& ctx, std::vector<Check>& out) {
  const int n = ctx.dim();
  for (auto [a, b] : ctx.pairs()) {
    auto r = std::make_shared<Expr>(ricci(ctx, a, b));
    for (auto [m, nu] : ctx.pairs()) {
      for (auto [k, l] : ctx.pairs()) {
        out.push_back(expr_check("d2 closed form " + idx({a, b, k, l, m, nu}),
                                 dricci_d2(ctx, a, b, k, l, m, nu) - formal_diff(*r, var::d2(k, l, m, nu))));
      }
      for (int k = 1; k <= n; ++k) {
        out.push_back(expr_check("d1 closed form " + idx({a, b, k, m, nu}),
                                 dricci_d1(ctx, a, b, k, m, nu) - formal_diff(*r, var::d1(k, m, nu))));
      }
      auto d0 = std::make_shared<Expr>(dricci_d0(ctx, a, b, m, nu));
      out.push_back({"d0 closed form vs chain rule " + idx({a, b, m, nu}), {*d0, *r},
                     [&ctx, d0, r, m, nu](const PointAssignment& pt) {
                       return eval(*d0, pt) - chain_rule_d0(ctx, *r, m, nu, pt);
                     }});
    }
  }
}

void gct_checks(const MetricContext& ctx, unsigned jobs, std::vector<Check>& out) {
  const int n = ctx.dim();
  std::vector<IndexPair> comps = n <= 3 ? ctx.pairs() : std::vector<IndexPair>{{1, 1}};
  const ProlongationTables tables(ctx, gct_generator(ctx), Route::Expanded, jobs);
  ProlongedAction act{n, SymmetricArray<Expr>(n)};
  std::vector<Expr> parts(comps.size());
  parallel_for(comps.size(), jobs, [&](std::size_t i) {
    parts[i] = prolong_einstein_component(ctx, tables, comps[i].first, comps[i].second);
  });
  for (std::size_t i = 0; i < comps.size(); ++i) act.action.at(comps[i].first, comps[i].second) = parts[i];
  for (auto [a, b] : comps) {
    out.push_back(expr_check("coordinate generator residual " + idx({a, b}), gct_residual(ctx, act, a, b, 1, 1)));
  }
}

void scaling_checks(const MetricContext& ctx, unsigned jobs, std::vector<Check>& out) {
  const ProlongationTables tables(ctx, scaling_generator(ctx), Route::Expanded, jobs);
  const Expr a = Expr::variable(var::param("A"));
  for (auto [m, nu] : ctx.pairs()) {
    out.push_back(expr_check("rescaling on R " + idx({m, nu}), prolong_direct(ctx, tables, ricci(ctx, m, nu))));
    out.push_back(expr_check("rescaling on D " + idx({m, nu}),
                             prolong_einstein_component(ctx, tables, m, nu) + sym::lam() * a * sym::g(m, nu)));
  }
}

void determining_checks(const MetricContext& ctx, unsigned jobs, std::vector<Check>& out) {
  const DeterminingSystem sys = extract_dg(ctx, jobs);
  for (const Constraint& c : sys.constraints) {
    const auto& i = c.indices;
    const int a = i[0], b = i[1], l = i[2], m = i[3], nn = i[4];
    if (l == a || l == b || m == a || m == b || nn == a || nn == b) continue;
    out.push_back(expr_check("first-derivative instance " + idx({a, b, l, m, nn}),
                             c.expr + Rational(1, 2) * g_cap_symbol(ctx, m, nn) * dg_reduced_formula(ctx, a, b, l)));
  }
}

std::vector<Check> checks_for(const MetricContext& ctx, const std::string& target, unsigned jobs) {
  std::vector<Check> out;
  const bool all = target == "all";
  if (all || target == "ricci") ricci_checks(ctx, out);
  if (all || target == "dricci") dricci_checks(ctx, out);
  if (all || target == "prolong-gct") gct_checks(ctx, jobs, out);
  if (all || target == "prolong-scaling") scaling_checks(ctx, jobs, out);
  if (all) determining_checks(ctx, jobs, out);
  if (out.empty()) throw std::invalid_argument("unknown oracle target: " + target);
  return out;
}

}  // namespace

const Rational& PointAssignment::at(VarId v) const {
  auto it = values.find(v);
  if (it == values.end()) throw OracleError("unassigned atom " + var::name(v));
  return it->second;
}

PointAssignment sample(const MetricContext& ctx, std::uint64_t seed, const std::vector<Expr>& cover,
                       const SampleOptions& opt) {
  const int n = ctx.dim();
  std::mt19937_64 rng(seed);
  PointAssignment pt;
  pt.seed = seed;
  Matrix g(n, std::vector<Rational>(n));
  Matrix inv;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= opt.budget) throw OracleError("rejection budget exceeded");
    for (auto [a, b] : ctx.pairs()) {
      g[a - 1][b - 1] = draw(rng, opt.height);
      g[b - 1][a - 1] = g[a - 1][b - 1];
    }
    if (invert(g, inv).abs() >= opt.min_det) break;
  }
  for (auto [a, b] : ctx.pairs()) {
    pt.values.emplace(var::metric(a, b), g[a - 1][b - 1]);
    pt.values.emplace(var::inv_metric(a, b), inv[a - 1][b - 1]);
  }
  for (int order = 1; order <= 2; ++order) {
    for (VarId v : enumerate_vars(ctx, order)) pt.values.emplace(v, draw(rng, opt.height));
  }
  std::set<VarId> rest;
  for (const Expr& e : cover) {
    for (VarId v : e.variables()) {
      if (!pt.values.contains(v)) rest.insert(v);
    }
  }
  for (VarId v : rest) pt.values.emplace(v, draw(rng, opt.height));
  return pt;
}

Rational eval(const Expr& p, const PointAssignment& pt) {
  return evaluate(p, [&](VarId v) { return pt.at(v); });
}

Rational eval(const MetricContext& ctx, const FracExpr& p, const PointAssignment& pt) {
  const Rational num = eval(p.num, pt);
  if (p.den_power == 0) return num;
  const Rational det = eval(ctx.det(), pt);
  if (det.is_zero()) throw OracleError("degenerate metric");
  return num / det.pow(p.den_power);
}

Rational reference_ricci(const MetricContext& ctx, const PointAssignment& pt, int alpha, int beta) {
  const int n = ctx.dim();
  auto dg = [&](int k, int a, int b) { return pt.at(var::d1(k, a, b)); };
  auto ddg = [&](int k, int l, int a, int b) { return pt.at(var::d2(k, l, a, b)); };
  auto gi = [&](int a, int b) { return pt.at(var::inv_metric(a, b)); };
  // first kind and its derivatives
  auto low = [&](int c, int a, int b) { return Rational(1, 2) * (dg(a, c, b) + dg(b, c, a) - dg(c, a, b)); };
  auto dlow = [&](int k, int c, int a, int b) {
    return Rational(1, 2) * (ddg(k, a, c, b) + ddg(k, b, c, a) - ddg(k, c, a, b));
  };
  auto up = [&](int c, int a, int b) {
    Rational s;
    for (int d = 1; d <= n; ++d) s.add_product(gi(c, d), low(d, a, b));
    return s;
  };
  auto dinv = [&](int k, int c, int d) {
    Rational s;
    for (int e = 1; e <= n; ++e) {
      for (int f = 1; f <= n; ++f) s -= gi(c, e) * dg(k, e, f) * gi(f, d);
    }
    return s;
  };
  auto dup = [&](int k, int c, int a, int b) {
    Rational s;
    for (int d = 1; d <= n; ++d) {
      s.add_product(dinv(k, c, d), low(d, a, b));
      s.add_product(gi(c, d), dlow(k, d, a, b));
    }
    return s;
  };
  Rational r;
  for (int c = 1; c <= n; ++c) {
    r += dup(c, c, alpha, beta) - dup(beta, c, alpha, c);
    for (int d = 1; d <= n; ++d) {
      r += up(c, c, d) * up(d, alpha, beta) - up(c, beta, d) * up(d, alpha, c);
    }
  }
  return r;
}

Rational chain_rule_d0(const MetricContext& ctx, const Expr& ricci_ab, int mu, int nu, const PointAssignment& pt) {
  const int n = ctx.dim();
  auto gi = [&](int a, int b) { return pt.at(var::inv_metric(a, b)); };
  Rational out = eval(formal_diff(ricci_ab, var::metric(mu, nu)), pt);
  for (int a = 1; a <= n; ++a) {
    for (int b = a; b <= n; ++b) {
      const Expr part = formal_diff(ricci_ab, var::inv_metric(a, b));
      if (part.is_zero()) continue;
      // dg^{ab}/dg_mn with g_mn and g_nm one variable
      Rational d = -(gi(a, mu) * gi(nu, b));
      if (mu != nu) d -= gi(a, nu) * gi(mu, b);
      out += eval(part, pt) * d;
    }
  }
  return out;
}

std::vector<NamedIdentity> certified_zeros(const MetricContext& ctx, const std::string& target, unsigned jobs) {
  std::vector<NamedIdentity> out;
  for (Check& c : checks_for(ctx, target, jobs)) {
    if (c.cover.size() == 1 && c.name.find("reference") == std::string::npos &&
        c.name.find("adjugate") == std::string::npos) {
      out.push_back({c.name, c.cover.front()});
    }
  }
  return out;
}

OracleReport run_oracle(const MetricContext& ctx, const std::string& target, int samples, std::uint64_t seed,
                        unsigned jobs) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  const std::vector<Check> checks = checks_for(ctx, target, jobs);
  std::vector<Expr> cover;
  for (const Check& c : checks) cover.insert(cover.end(), c.cover.begin(), c.cover.end());
  std::vector<std::vector<std::string>> fails(static_cast<std::size_t>(samples));
  parallel_for(fails.size(), jobs, [&](std::size_t i) {
    const PointAssignment pt = sample(ctx, seed + i, cover);
    for (const Check& c : checks) {
      const Rational v = c.residual(pt);
      if (!v.is_zero()) fails[i].push_back(c.name + " @ seed " + std::to_string(seed + i) + ": " + v.str());
    }
  });
  OracleReport rep;
  rep.target = target;
  rep.dim = ctx.dim();
  rep.samples = samples;
  rep.seed = seed;
  rep.identities = checks.size();
  rep.evaluations = checks.size() * static_cast<std::size_t>(samples);
  for (auto& f : fails) rep.failures.insert(rep.failures.end(), f.begin(), f.end());
  return rep;
}

nlohmann::json to_json(const OracleReport& r) {
  return {{"schema", 1},
          {"target", r.target},
          {"dim", r.dim},
          {"samples", r.samples},
          {"seed", r.seed},
          {"identities", r.identities},
          {"evaluations", r.evaluations},
          {"status", r.passed() ? "pass" : "fail"},
          {"failures", r.failures}};
}

}  // namespace einsym
