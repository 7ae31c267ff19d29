#include "einsym/prolongation.hpp"

#include <stdexcept>
#include <unordered_map>

#include "einsym/parallel.hpp"

namespace einsym {
namespace {

bool depends_on_pair(const FuncAtom& f, IndexPair pair, const Dependence& dep) {
  switch (f.kind) {
    case FuncKind::H:
      return dep.h_on_metric;
    case FuncKind::Phi:
      return true;
    case FuncKind::PhiTilde:
      return canonical_pair(f.i, f.j) == pair;
    default:
      return false;
  }
}

// Runs `derive` with a per-call cache of atom images.
template <class Image>
Expr derive_cached(const Expr& p, Image&& image) {
  std::unordered_map<VarId, std::optional<Expr>> cache;
  return derive(p, [&](VarId v) -> const Expr* {
    auto it = cache.find(v);
    if (it == cache.end()) it = cache.emplace(v, image(v)).first;
    return it->second ? &*it->second : nullptr;
  });
}

Expr h_atom(int eta) { return Expr::variable(var::H(eta)); }

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.dim != b.dim) throw std::invalid_argument("vector fields of different dimension");
  VectorField out(a.dim);
  out.dep.h_on_metric = a.dep.h_on_metric || b.dep.h_on_metric;
  for (int i = 0; i < a.dim; ++i) out.H[i] = a.H[i] + b.H[i];
  for (std::size_t s = 0; s < a.Phi.values().size(); ++s) {
    out.Phi.values()[s] = a.Phi.values()[s] + b.Phi.values()[s];
  }
  return out;
}

VectorField operator*(const Rational& c, const VectorField& a) {
  VectorField out = a;
  for (Expr& e : out.H) e *= c;
  for (Expr& e : out.Phi.values()) e *= c;
  return out;
}

bool operator==(const VectorField& a, const VectorField& b) {
  return a.dim == b.dim && a.H == b.H && a.Phi.values() == b.Phi.values();
}

VectorField generic_field(const MetricContext& ctx, Dependence dep) {
  VectorField vf(ctx.dim());
  vf.dep = dep;
  for (int eta = 1; eta <= ctx.dim(); ++eta) vf.H[eta - 1] = h_atom(eta);
  for (auto [mu, nu] : ctx.pairs()) vf.Phi.at(mu, nu) = Expr::variable(var::Phi(mu, nu));
  return vf;
}

Expr partial_x(const Expr& p, int alpha) {
  return derive_cached(p, [alpha](VarId v) -> std::optional<Expr> {
    switch (var::kind(v)) {
      case VarKind::Coord:
        if (var::decode(v).idx[0] == alpha) return Expr(1L);
        return std::nullopt;
      case VarKind::Func:
        return Expr::variable(var::func(var::func_atom(v).with_x(alpha)));
      default:
        return std::nullopt;
    }
  });
}

Expr partial_g(const MetricContext& ctx, const Expr& p, int mu, int nu, const Dependence& dep) {
  const IndexPair pair = canonical_pair(mu, nu);
  return derive_cached(p, [&](VarId v) -> std::optional<Expr> {
    switch (var::kind(v)) {
      case VarKind::Metric: {
        const JetVar j = var::decode(v);
        if (canonical_pair(j.idx[0], j.idx[1]) == pair) return Expr(1L);
        return std::nullopt;
      }
      case VarKind::InvMetric: {
        const JetVar j = var::decode(v);
        return -x_symbol_upper(ctx, j.idx[0], j.idx[1], pair.first, pair.second);
      }
      case VarKind::Func: {
        const FuncAtom f = var::func_atom(v);
        if (!depends_on_pair(f, pair, dep)) return std::nullopt;
        return Expr::variable(var::func(f.with_g(pair.first, pair.second)));
      }
      default:
        return std::nullopt;
    }
  });
}

Expr total_derivative(const MetricContext& ctx, const Expr& p, int alpha, const Dependence& dep) {
  ctx.check_index(alpha);
  return derive_cached(p, [&](VarId v) -> std::optional<Expr> {
    const VarKind kind = var::kind(v);
    switch (kind) {
      case VarKind::Coord:
        if (var::decode(v).idx[0] == alpha) return Expr(1L);
        return std::nullopt;
      case VarKind::Metric: {
        const JetVar j = var::decode(v);
        return Expr::variable(var::d1(alpha, j.idx[0], j.idx[1]));
      }
      case VarKind::InvMetric: {
        const JetVar j = var::decode(v);
        ExprBuilder b;
        for (auto [m, n] : ctx.pairs()) {
          b.add_product(x_symbol_upper(ctx, j.idx[0], j.idx[1], m, n), sym::d1(alpha, m, n), Rational(-1));
        }
        return b.build();
      }
      case VarKind::D1: {
        const JetVar j = var::decode(v);
        return Expr::variable(canon(ctx, VarKind::D2, {alpha, j.idx[0], j.idx[1], j.idx[2]}));
      }
      case VarKind::D2: {
        const JetVar j = var::decode(v);
        return Expr::variable(canon(ctx, VarKind::D3, {alpha, j.idx[0], j.idx[1], j.idx[2], j.idx[3]}));
      }
      case VarKind::D3:
        throw std::logic_error("total derivative of a third-order atom");
      case VarKind::Func: {
        const FuncAtom f = var::func_atom(v);
        ExprBuilder b;
        b.add(Expr::variable(var::func(f.with_x(alpha))));
        for (auto pair : ctx.pairs()) {
          if (!depends_on_pair(f, pair, dep)) continue;
          b.add_product(sym::d1(alpha, pair.first, pair.second),
                        Expr::variable(var::func(f.with_g(pair.first, pair.second))));
        }
        return b.build();
      }
      default:
        return std::nullopt;
    }
  });
}

Expr phi_first(const MetricContext& ctx, const VectorField& vf, int tau, int gamma, int alpha) {
  const Expr& phi = vf.phi(tau, gamma);
  ExprBuilder b;
  b.add(partial_x(phi, alpha));
  for (int eta = 1; eta <= ctx.dim(); ++eta) {
    b.add_product(sym::d1(eta, tau, gamma), partial_x(vf.h(eta), alpha), Rational(-1));
  }
  for (auto [mu, nu] : ctx.pairs()) {
    const Expr dg = sym::d1(alpha, mu, nu);
    b.add_product(dg, partial_g(ctx, phi, mu, nu, vf.dep));
    for (int eta = 1; eta <= ctx.dim(); ++eta) {
      Expr dh = partial_g(ctx, vf.h(eta), mu, nu, vf.dep);
      if (dh.is_zero()) continue;
      b.add_product(dg * sym::d1(eta, tau, gamma), dh, Rational(-1));
    }
  }
  return b.build();
}

Expr phi_first_total(const MetricContext& ctx, const VectorField& vf, int tau, int gamma, int alpha) {
  Expr q = vf.phi(tau, gamma);
  for (int eta = 1; eta <= ctx.dim(); ++eta) q -= vf.h(eta) * sym::d1(eta, tau, gamma);
  Expr out = total_derivative(ctx, q, alpha, vf.dep);
  for (int eta = 1; eta <= ctx.dim(); ++eta) {
    out += vf.h(eta) * Expr::variable(canon(ctx, VarKind::D2, {alpha, eta, tau, gamma}));
  }
  return out;
}

Expr phi_second(const MetricContext& ctx, const VectorField& vf, int alpha, int beta, int gamma, int delta) {
  const int n = ctx.dim();
  const Dependence& dep = vf.dep;
  const Expr& phi = vf.phi(alpha, beta);
  const auto& pairs = ctx.pairs();
  auto dd = [&](int k, int l, int m, int nn) { return Expr::variable(canon(ctx, VarKind::D2, {k, l, m, nn})); };

  // Metric derivatives of Phi_ab and H^eta, reused across terms.
  std::vector<Expr> phi_g(pairs.size());
  std::vector<std::vector<Expr>> h_g(static_cast<std::size_t>(n), std::vector<Expr>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    phi_g[p] = partial_g(ctx, phi, pairs[p].first, pairs[p].second, dep);
    for (int eta = 1; eta <= n; ++eta) {
      h_g[eta - 1][p] = partial_g(ctx, vf.h(eta), pairs[p].first, pairs[p].second, dep);
    }
  }

  ExprBuilder b;
  b.add(partial_x(partial_x(phi, delta), gamma));
  for (int eta = 1; eta <= n; ++eta) {
    const Expr u = sym::d1(eta, alpha, beta);
    const Expr& h = vf.h(eta);
    b.add_product(u, partial_x(partial_x(h, delta), gamma), Rational(-1));
    b.add_product(dd(delta, eta, alpha, beta), partial_x(h, gamma), Rational(-1));
    b.add_product(dd(gamma, eta, alpha, beta), partial_x(h, delta), Rational(-1));
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [mu, nu] = pairs[p];
    const Expr dg_g = sym::d1(gamma, mu, nu);
    const Expr dg_d = sym::d1(delta, mu, nu);
    if (!phi_g[p].is_zero()) {
      b.add_product(dg_d, partial_x(phi_g[p], gamma));
      b.add_product(dg_g, partial_x(phi_g[p], delta));
      b.add_product(dd(gamma, delta, mu, nu), phi_g[p]);
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        Expr second = partial_g(ctx, phi_g[p], pairs[q].first, pairs[q].second, dep);
        if (second.is_zero()) continue;
        b.add_product(dg_g * sym::d1(delta, pairs[q].first, pairs[q].second), second);
      }
    }
    for (int eta = 1; eta <= n; ++eta) {
      const Expr& hg = h_g[eta - 1][p];
      if (hg.is_zero()) continue;
      const Expr u = sym::d1(eta, alpha, beta);
      b.add_product(dg_g * u, partial_x(hg, delta), Rational(-1));
      b.add_product(dg_d * u, partial_x(hg, gamma), Rational(-1));
      b.add_product(dg_g * dd(delta, eta, alpha, beta), hg, Rational(-1));
      b.add_product(dg_d * dd(gamma, eta, alpha, beta), hg, Rational(-1));
      b.add_product(u * dd(delta, gamma, mu, nu), hg, Rational(-1));
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        Expr second = partial_g(ctx, hg, pairs[q].first, pairs[q].second, dep);
        if (second.is_zero()) continue;
        b.add_product(dg_g * sym::d1(delta, pairs[q].first, pairs[q].second) * u, second, Rational(-1));
      }
    }
  }
  return b.build();
}

Expr phi_second_total(const MetricContext& ctx, const VectorField& vf, int alpha, int beta, int gamma, int delta) {
  Expr q = vf.phi(alpha, beta);
  for (int eta = 1; eta <= ctx.dim(); ++eta) q -= vf.h(eta) * sym::d1(eta, alpha, beta);
  Expr out = total_derivative(ctx, total_derivative(ctx, q, delta, vf.dep), gamma, vf.dep);
  for (int eta = 1; eta <= ctx.dim(); ++eta) {
    out += vf.h(eta) * Expr::variable(canon(ctx, VarKind::D3, {gamma, delta, eta, alpha, beta}));
  }
  if (out.contains_if([](VarId v) { return var::kind(v) == VarKind::D3; })) {
    throw std::logic_error("third-order atoms survive in the second prolongation");
  }
  return out;
}

ProlongationTables::ProlongationTables(const MetricContext& ctx, const VectorField& vf, Route route, unsigned jobs)
    : n_(ctx.dim()), pairs_(ctx.pairs().size()), vf_(vf) {
  if (vf.dim != n_) throw std::invalid_argument("vector field dimension does not match the context");
  const auto& pairs = ctx.pairs();
  const auto n = static_cast<std::size_t>(n_);
  first_.resize(pairs_ * n);
  second_.resize(pairs_ * pairs_);
  parallel_for(first_.size(), jobs, [&](std::size_t i) {
    const auto [t, g] = pairs[i / n];
    const int a = static_cast<int>(i % n) + 1;
    first_[i] = route == Route::Expanded ? phi_first(ctx, vf, t, g, a) : phi_first_total(ctx, vf, t, g, a);
  });
  parallel_for(second_.size(), jobs, [&](std::size_t i) {
    const auto [a, b] = pairs[i / pairs_];
    const auto [g, d] = pairs[i % pairs_];
    second_[i] = route == Route::Expanded ? phi_second(ctx, vf, a, b, g, d) : phi_second_total(ctx, vf, a, b, g, d);
  });
}

const Expr& ProlongationTables::first(int tau, int gamma, int alpha) const {
  return first_.at(SymmetricArray<int>::slot(n_, tau, gamma) * static_cast<std::size_t>(n_) +
                   static_cast<std::size_t>(alpha - 1));
}

const Expr& ProlongationTables::second(int alpha, int beta, int gamma, int delta) const {
  return second_.at(SymmetricArray<int>::slot(n_, alpha, beta) * pairs_ + SymmetricArray<int>::slot(n_, gamma, delta));
}

namespace {

struct Contractions {
  int n;
  std::vector<Expr> phi_up;     // Phi^{gd}, n x n
  std::vector<Expr> gam;        // Gamma_{tga}, n^3
  std::vector<Expr> gam_up2;    // g^{tr} g^{gd} Gamma_{rdb}, n^3 (t, g, b)
  std::vector<Expr> gam_up1;    // g^{tr} Gamma_{rab}, n^3 (t, a, b)
  std::vector<Expr> gam_trace;  // g^{gd} Gamma_{tgd}, n (t)
  std::vector<Expr> gam_trace_up;  // g^{tr} g^{gd} Gamma_{rgd}, n
  std::vector<Expr> pg;         // Phi_{tga} + Phi_{tag} - Phi_{gat}, n^3
  std::vector<Expr> pg_trace;   // g^{gd} pg(t, g, d), n

  [[nodiscard]] std::size_t i2(int a, int b) const { return static_cast<std::size_t>((a - 1) * n + (b - 1)); }
  [[nodiscard]] std::size_t i3(int a, int b, int c) const {
    return static_cast<std::size_t>(((a - 1) * n + (b - 1)) * n + (c - 1));
  }
};

Contractions build_contractions(const MetricContext& ctx, const ProlongationTables& t) {
  const int n = ctx.dim();
  Contractions c{n, {}, {}, {}, {}, {}, {}, {}, {}};
  const auto n2 = static_cast<std::size_t>(n * n);
  c.phi_up.resize(n2);
  c.gam.resize(n2 * n);
  c.gam_up2.resize(n2 * n);
  c.gam_up1.resize(n2 * n);
  c.pg.resize(n2 * n);
  c.gam_trace.resize(n);
  c.gam_trace_up.resize(n);
  c.pg_trace.resize(n);
  const VectorField& vf = t.field();
  for (int g = 1; g <= n; ++g) {
    for (int d = 1; d <= n; ++d) {
      ExprBuilder b;
      for (int k = 1; k <= n; ++k) {
        for (int l = 1; l <= n; ++l) b.add_product(sym::gi(g, k) * sym::gi(d, l), vf.phi(k, l));
      }
      c.phi_up[c.i2(g, d)] = b.build();
    }
  }
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      for (int e = 1; e <= n; ++e) {
        c.gam[c.i3(a, b, e)] = christoffel(ctx, a, b, e);
        c.pg[c.i3(a, b, e)] = t.first(a, b, e) + t.first(a, e, b) - t.first(b, e, a);
      }
    }
  }
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      for (int e = 1; e <= n; ++e) {
        ExprBuilder up2;
        ExprBuilder up1;
        for (int r = 1; r <= n; ++r) {
          up1.add_product(sym::gi(a, r), c.gam[c.i3(r, b, e)]);
          for (int d = 1; d <= n; ++d) up2.add_product(sym::gi(a, r) * sym::gi(b, d), c.gam[c.i3(r, d, e)]);
        }
        c.gam_up2[c.i3(a, b, e)] = up2.build();
        c.gam_up1[c.i3(a, b, e)] = up1.build();
      }
    }
  }
  for (int t0 = 1; t0 <= n; ++t0) {
    ExprBuilder tr;
    ExprBuilder ptr;
    for (int g = 1; g <= n; ++g) {
      for (int d = 1; d <= n; ++d) {
        tr.add_product(sym::gi(g, d), c.gam[c.i3(t0, g, d)]);
        ptr.add_product(sym::gi(g, d), c.pg[c.i3(t0, g, d)]);
      }
    }
    c.gam_trace[t0 - 1] = tr.build();
    c.pg_trace[t0 - 1] = ptr.build();
  }
  for (int t0 = 1; t0 <= n; ++t0) {
    ExprBuilder b;
    for (int r = 1; r <= n; ++r) b.add_product(sym::gi(t0, r), c.gam_trace[r - 1]);
    c.gam_trace_up[t0 - 1] = b.build();
  }
  return c;
}

Expr assemble_component(const MetricContext& ctx, const ProlongationTables& t, const Contractions& c, int alpha,
                        int beta) {
  const int n = ctx.dim();
  const Rational half(1, 2);
  auto dd = [&](int k, int l, int m, int nn) { return Expr::variable(canon(ctx, VarKind::D2, {k, l, m, nn})); };
  ExprBuilder b;
  b.add_product(sym::lam(), t.field().phi(alpha, beta), Rational(-1));

  for (int g = 1; g <= n; ++g) {
    for (int d = 1; d <= n; ++d) {
      const Expr bracket = dd(g, d, alpha, beta) + dd(alpha, beta, g, d) - dd(d, beta, g, alpha) - dd(g, alpha, d, beta);
      b.add_product(c.phi_up[c.i2(g, d)], bracket, half);
    }
  }

  // -(G_tga G_rdb - G_tgd G_rab)(g^{gd} Phi^{tr} + g^{tr} Phi^{gd})
  for (int tt = 1; tt <= n; ++tt) {
    for (int g = 1; g <= n; ++g) {
      for (int r = 1; r <= n; ++r) {
        for (int d = 1; d <= n; ++d) {
          const Expr weight = sym::gi(g, d) * c.phi_up[c.i2(tt, r)] + sym::gi(tt, r) * c.phi_up[c.i2(g, d)];
          const Expr gg = c.gam[c.i3(tt, g, alpha)] * c.gam[c.i3(r, d, beta)] -
                          c.gam[c.i3(tt, g, d)] * c.gam[c.i3(r, alpha, beta)];
          if (gg.is_zero()) continue;
          b.add_product(gg, weight, Rational(-1));
        }
      }
    }
  }

  // 1/2 g^{gd} g^{tr} {pg_tga G_rdb + pg_rdb G_tga - pg_tgd G_rab - pg_rab G_tgd}
  for (int tt = 1; tt <= n; ++tt) {
    for (int g = 1; g <= n; ++g) {
      b.add_product(c.pg[c.i3(tt, g, alpha)], c.gam_up2[c.i3(tt, g, beta)], half);
      b.add_product(c.pg[c.i3(tt, g, beta)], c.gam_up2[c.i3(tt, g, alpha)], half);
    }
    b.add_product(c.pg_trace[tt - 1], c.gam_up1[c.i3(tt, alpha, beta)], -half);
    b.add_product(c.pg[c.i3(tt, alpha, beta)], c.gam_trace_up[tt - 1], -half);
  }

  for (int g = 1; g <= n; ++g) {
    for (int d = 1; d <= n; ++d) {
      const Expr s = -t.second(alpha, beta, g, d) - t.second(g, d, alpha, beta) + t.second(g, alpha, d, beta) +
                     t.second(d, beta, g, alpha);
      b.add_product(sym::gi(g, d), s, half);
    }
  }
  return b.build();
}

}  // namespace

Expr prolong_einstein_component(const MetricContext& ctx, const ProlongationTables& tables, int alpha, int beta) {
  ctx.check_index(alpha);
  ctx.check_index(beta);
  return assemble_component(ctx, tables, build_contractions(ctx, tables), alpha, beta);
}

ProlongedAction prolong_einstein(const MetricContext& ctx, const ProlongationTables& tables, unsigned jobs) {
  const Contractions c = build_contractions(ctx, tables);
  ProlongedAction out{ctx.dim(), SymmetricArray<Expr>(ctx.dim())};
  const auto& pairs = ctx.pairs();
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    out.action.values()[i] = assemble_component(ctx, tables, c, pairs[i].first, pairs[i].second);
  });
  return out;
}

ProlongedAction prolong_einstein(const MetricContext& ctx, const VectorField& vf, unsigned jobs) {
  return prolong_einstein(ctx, ProlongationTables(ctx, vf, Route::Expanded, jobs), jobs);
}

Expr prolong_direct(const MetricContext& ctx, const ProlongationTables& tables, const Expr& target) {
  const VectorField& vf = tables.field();
  const int n = ctx.dim();
  ExprBuilder b;
  for (int mu = 1; mu <= n; ++mu) {
    Expr dx = partial_x(target, mu);
    if (!dx.is_zero()) b.add_product(vf.h(mu), dx);
  }
  for (auto [mu, nu] : ctx.pairs()) {
    Expr d0 = metric_chain_diff(ctx, target, mu, nu);
    if (!d0.is_zero()) b.add_product(vf.phi(mu, nu), d0);
  }
  for (VarId v : target.variables()) {
    const VarKind kind = var::kind(v);
    if (kind != VarKind::D1 && kind != VarKind::D2) continue;
    const JetVar j = var::decode(v);
    const Expr coeff = kind == VarKind::D1 ? tables.first(j.idx[1], j.idx[2], j.idx[0])
                                           : tables.second(j.idx[2], j.idx[3], j.idx[0], j.idx[1]);
    b.add_product(coeff, formal_diff(target, v));
  }
  return b.build();
}

Expr prolong_direct(const MetricContext& ctx, const VectorField& vf, const Expr& target) {
  return prolong_direct(ctx, ProlongationTables(ctx, vf, Route::Expanded, 1), target);
}

}  // namespace einsym
