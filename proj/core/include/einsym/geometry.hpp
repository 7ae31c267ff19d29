#pragma once

// Christoffel symbols, the Ricci tensor and the vacuum system
// Delta_ab = R_ab - lam g_ab, together with the closed forms of the partial
// derivatives of R_ab with respect to the jet coordinates.

#include <optional>
#include <vector>

#include "einsym/expr.hpp"
#include "einsym/jetspace.hpp"

namespace einsym {

// Gamma_{tau gamma alpha} = 1/2 (d_alpha g_tg + d_gamma g_ta - d_tau g_ga).
Expr christoffel(const MetricContext& ctx, int tau, int gamma, int alpha);

// R_ab over inverse-metric, D1 and D2 atoms.
Expr ricci(const MetricContext& ctx, int alpha, int beta);
Expr einstein_delta(const MetricContext& ctx, int alpha, int beta);

struct EinsteinSystem {
  int dim = 0;
  SymmetricArray<Expr> ricci;
  SymmetricArray<Expr> delta;
};

// Builds every component; the result does not depend on `jobs`.
EinsteinSystem einstein_system(const MetricContext& ctx, unsigned jobs = 1);

// g^{mu nu} as adj/det entries, row-major.
std::vector<std::vector<FracExpr>> exact_inverse(const MetricContext& ctx);

// dR_ab / d(d_k d_l g_mn), k <= l, m <= n.
Expr dricci_d2(const MetricContext& ctx, int alpha, int beta, int kappa, int lambda, int mu, int nu);
// dR_ab / d(d_k g_mn), m <= n.
Expr dricci_d1(const MetricContext& ctx, int alpha, int beta, int kappa, int mu, int nu);
// dR_ab / dg_mn, m <= n, with the inverse metric differentiated through.
Expr dricci_d0(const MetricContext& ctx, int alpha, int beta, int mu, int nu);

// d p / d g_mn where inverse-metric atoms follow dg^{ab} = -X^{ab mn} dg_mn.
Expr metric_chain_diff(const MetricContext& ctx, const Expr& p, int mu, int nu);

// Second-derivative atoms of the shapes d_r d_s g_ss and d_s d_s g_rs, r != s
// (2 N (N - 1) distinct atoms).
std::vector<VarId> absent_shape_atoms(const MetricContext& ctx);
// Every D2 atom that occurs in no component of the system.
std::vector<VarId> absent_d2_atoms(const MetricContext& ctx, const EinsteinSystem& sys);

struct AbsentReport {
  struct Offence {
    int alpha;
    int beta;
    VarId atom;
  };
  bool ok = true;
  std::vector<VarId> checked;
  std::optional<Offence> offence;
};

AbsentReport check_absent_derivatives(const MetricContext& ctx, const EinsteinSystem& sys);
AbsentReport check_absent_derivatives(const MetricContext& ctx);

}  // namespace einsym
