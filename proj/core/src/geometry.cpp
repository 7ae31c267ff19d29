#include "einsym/geometry.hpp"

#include <algorithm>
#include <set>

#include "einsym/parallel.hpp"

namespace einsym {

using sym::d1;
using sym::d2;
using sym::g;
using sym::gi;

Expr christoffel(const MetricContext& ctx, int tau, int gamma, int alpha) {
  for (int i : {tau, gamma, alpha}) ctx.check_index(i);
  return (d1(alpha, tau, gamma) + d1(gamma, tau, alpha) - d1(tau, gamma, alpha)) * Rational(1, 2);
}

Expr ricci(const MetricContext& ctx, int alpha, int beta) {
  ctx.check_index(alpha);
  ctx.check_index(beta);
  const int n = ctx.dim();
  ExprBuilder b;
  const Rational half(1, 2);
  for (int c = 1; c <= n; ++c) {
    for (int d = 1; d <= n; ++d) {
      Expr second = -d2(c, d, alpha, beta) - d2(alpha, beta, c, d) + d2(beta, d, alpha, c) + d2(alpha, c, d, beta);
      b.add_product(gi(c, d), second, half);
    }
  }
  // Christoffel products, grouped per (gamma, delta, tau, rho).
  std::vector<Expr> gam(static_cast<std::size_t>(n * n * n));
  auto G = [&](int t, int c, int a) -> const Expr& { return gam[((t - 1) * n + (c - 1)) * n + (a - 1)]; };
  for (int t = 1; t <= n; ++t) {
    for (int c = 1; c <= n; ++c) {
      for (int a = 1; a <= n; ++a) gam[((t - 1) * n + (c - 1)) * n + (a - 1)] = christoffel(ctx, t, c, a);
    }
  }
  for (int c = 1; c <= n; ++c) {
    for (int d = 1; d <= n; ++d) {
      for (int t = 1; t <= n; ++t) {
        for (int r = 1; r <= n; ++r) {
          Expr quad = G(t, c, alpha) * G(r, d, beta) - G(t, c, d) * G(r, alpha, beta);
          if (quad.is_zero()) continue;
          b.add_product(gi(c, d) * gi(t, r), quad);
        }
      }
    }
  }
  return b.build();
}

Expr einstein_delta(const MetricContext& ctx, int alpha, int beta) {
  return ricci(ctx, alpha, beta) - sym::lam() * g(alpha, beta);
}

EinsteinSystem einstein_system(const MetricContext& ctx, unsigned jobs) {
  EinsteinSystem sys{ctx.dim(), SymmetricArray<Expr>(ctx.dim()), SymmetricArray<Expr>(ctx.dim())};
  const auto& pairs = ctx.pairs();
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    auto [a, b] = pairs[i];
    sys.ricci.values()[i] = ricci(ctx, a, b);
    sys.delta.values()[i] = sys.ricci.values()[i] - sym::lam() * g(a, b);
  });
  return sys;
}

std::vector<std::vector<FracExpr>> exact_inverse(const MetricContext& ctx) {
  const int n = ctx.dim();
  std::vector<std::vector<FracExpr>> out(n, std::vector<FracExpr>(n));
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) out[a - 1][b - 1] = ctx.inverse(a, b);
  }
  return out;
}

Expr dricci_d2(const MetricContext& ctx, int alpha, int beta, int kappa, int lambda, int mu, int nu) {
  const int n = ctx.dim();
  auto X = [&](int a, int b, int k, int l) { return x_symbol_mixed(ctx, a, b, k, l); };
  ExprBuilder out;
  for (int c = 1; c <= n; ++c) {
    for (int d = 1; d <= n; ++d) {
      Expr brace = -X(c, d, kappa, lambda) * X(alpha, beta, mu, nu) - X(alpha, beta, kappa, lambda) * X(c, d, mu, nu) +
                   X(d, beta, kappa, lambda) * X(c, alpha, mu, nu) + X(c, alpha, kappa, lambda) * X(d, beta, mu, nu);
      if (!brace.is_zero()) out.add_product(gi(c, d), brace, Rational(1, 2));
    }
  }
  return out.build();
}

Expr dricci_d1(const MetricContext& ctx, int alpha, int beta, int kappa, int mu, int nu) {
  const int n = ctx.dim();
  auto X = [&](int a, int b) { return x_symbol_mixed(ctx, a, b, mu, nu); };
  auto dk = [&](int a) { return kronecker(kappa, a); };
  auto G = [&](int t, int c, int a) { return christoffel(ctx, t, c, a); };
  ExprBuilder out;
  for (int c = 1; c <= n; ++c) {
    for (int d = 1; d <= n; ++d) {
      for (int t = 1; t <= n; ++t) {
        for (int r = 1; r <= n; ++r) {
          Expr brace = (dk(alpha) * X(t, c) + dk(c) * X(t, alpha) - dk(t) * X(c, alpha)) * G(r, d, beta) +
                       (dk(beta) * X(r, d) + dk(d) * X(r, beta) - dk(r) * X(d, beta)) * G(t, c, alpha) -
                       (dk(d) * X(t, c) + dk(c) * X(t, d) - dk(t) * X(c, d)) * G(r, alpha, beta) -
                       (dk(beta) * X(r, alpha) + dk(alpha) * X(r, beta) - dk(r) * X(alpha, beta)) * G(t, c, d);
          if (!brace.is_zero()) out.add_product(gi(c, d) * gi(t, r), brace, Rational(1, 2));
        }
      }
    }
  }
  return out.build();
}

Expr dricci_d0(const MetricContext& ctx, int alpha, int beta, int mu, int nu) {
  const int n = ctx.dim();
  auto XU = [&](int a, int b) { return x_symbol_upper(ctx, a, b, mu, nu); };
  auto G = [&](int t, int c, int a) { return christoffel(ctx, t, c, a); };
  ExprBuilder out;
  for (int c = 1; c <= n; ++c) {
    for (int d = 1; d <= n; ++d) {
      Expr second = d2(c, d, alpha, beta) + d2(alpha, beta, c, d) - d2(d, beta, c, alpha) - d2(c, alpha, d, beta);
      out.add_product(second, XU(c, d), Rational(1, 2));
    }
  }
  for (int c = 1; c <= n; ++c) {
    for (int d = 1; d <= n; ++d) {
      for (int t = 1; t <= n; ++t) {
        for (int r = 1; r <= n; ++r) {
          Expr quad = G(t, c, alpha) * G(r, d, beta) - G(t, c, d) * G(r, alpha, beta);
          if (quad.is_zero()) continue;
          out.add_product(quad, gi(c, d) * XU(t, r) + gi(t, r) * XU(c, d), Rational(-1));
        }
      }
    }
  }
  return out.build();
}

Expr metric_chain_diff(const MetricContext& ctx, const Expr& p, int mu, int nu) {
  Expr out = formal_diff(p, var::metric(mu, nu));
  for (auto [a, b] : ctx.pairs()) {
    Expr part = formal_diff(p, var::inv_metric(a, b));
    if (part.is_zero()) continue;
    out -= part * x_symbol_upper(ctx, a, b, mu, nu);
  }
  return out;
}

std::vector<VarId> absent_shape_atoms(const MetricContext& ctx) {
  std::set<VarId> atoms;
  const int n = ctx.dim();
  for (int r = 1; r <= n; ++r) {
    for (int s = 1; s <= n; ++s) {
      if (r == s) continue;
      atoms.insert(var::d2(r, s, s, s));
      atoms.insert(var::d2(s, s, r, s));
    }
  }
  return {atoms.begin(), atoms.end()};
}

std::vector<VarId> absent_d2_atoms(const MetricContext& ctx, const EinsteinSystem& sys) {
  std::set<VarId> present;
  for (const Expr& e : sys.delta.values()) {
    for (VarId v : e.variables()) {
      if (var::kind(v) == VarKind::D2) present.insert(v);
    }
  }
  std::vector<VarId> out;
  for (VarId v : enumerate_vars(ctx, 2)) {
    if (present.count(v) == 0U) out.push_back(v);
  }
  return out;
}

AbsentReport check_absent_derivatives(const MetricContext& ctx, const EinsteinSystem& sys) {
  AbsentReport report;
  report.checked = absent_shape_atoms(ctx);
  for (auto [a, b] : ctx.pairs()) {
    const auto vars = sys.ricci.at(a, b).variables();
    for (VarId atom : report.checked) {
      if (vars.count(atom) != 0U) {
        report.ok = false;
        report.offence = AbsentReport::Offence{a, b, atom};
        return report;
      }
    }
  }
  return report;
}

AbsentReport check_absent_derivatives(const MetricContext& ctx) {
  return check_absent_derivatives(ctx, einstein_system(ctx));
}

}  // namespace einsym
