#pragma once

// Concrete generators, their commutator, and the reduction of the vertical
// part of a symmetry to a uniform rescaling.

#include <optional>
#include <string>
#include <vector>

#include "einsym/determining.hpp"
#include "einsym/prolongation.hpp"
#include "einsym/report.hpp"

namespace einsym {

// H^a = f^a(x), Phi_ab = -g_ag d_b f^g - g_gb d_a f^g with generic f atoms.
VectorField gct_generator(const MetricContext& ctx);
// The same with explicit functions of the coordinates.
VectorField gct_generator(const MetricContext& ctx, const std::vector<Expr>& f);
// H = 0, Phi_mn = A g_mn with A the constant p[A] unless given.
VectorField scaling_generator(const MetricContext& ctx);
VectorField scaling_generator(const MetricContext& ctx, const Expr& a);
// H = 0, Phi = PhiT(x, own g) atoms.
VectorField vertical_field(const MetricContext& ctx);

// v(F) = H^a d_a F + Phi_(mn) dF/dg_mn, where F is a coefficient of a field
// with dependence `dep`.
Expr apply_field(const MetricContext& ctx, const VectorField& v, const Expr& f, const Dependence& dep);
// [v1, v2] with [v1, v2]F = v1(v2 F) - v2(v1 F).
VectorField commutator(const MetricContext& ctx, const VectorField& v1, const VectorField& v2);
// -f^a d_a PhiT_mn - PhiT_mg d_n f^g - PhiT_gn d_m f^g
//   + (g_mg d_n f^g + g_gn d_m f^g) dPhiT_mn/dg_mn, for generic f and PhiT.
SymmetricArray<Expr> vertical_gct_bracket_formula(const MetricContext& ctx);

struct GctSymmetryReport {
  ProofReport report;
  // Signs s1, s2 with pr v[D_ab] + s1 d_a f^g D_gb + s2 d_b f^g D_ag = 0.
  std::optional<std::pair<int, int>> signs;
};

// Components default to all (N <= 3) or (1,1) beyond.
GctSymmetryReport verify_gct_symmetry(const MetricContext& ctx, unsigned jobs = 1,
                                      std::vector<IndexPair> components = {});
// The residual for one sign choice; zero mod inverse for the right one.
Expr gct_residual(const MetricContext& ctx, const ProlongedAction& act, int alpha, int beta, int s1, int s2);

ProofReport verify_scaling(const MetricContext& ctx, bool lambda_zero = false, unsigned jobs = 1);

// Commutator membership and the substitution into the first-derivative
// equations, for N >= 3.
ProofReport ansatz_collapse(const MetricContext& ctx, unsigned jobs = 1);

// The two-dimensional branch.
ProofReport two_dim_branch(unsigned jobs = 1);
// B_12, B_11, B_22 in the closed polynomial form with constants p[a]..p[g].
SymmetricArray<Expr> two_dim_b_family();

enum class LambdaMode { Symbolic, Zero };

struct Certificate {
  int dim = 0;
  LambdaMode lambda = LambdaMode::Symbolic;
  ProofReport report;
  std::vector<std::string> generators;  // "GCT", "scaling"
  std::string phi_tilde;                // canonical text of the surviving vertical part
  [[nodiscard]] bool passed() const { return report.passed(); }
};

Certificate final_classification(const MetricContext& ctx, LambdaMode mode, unsigned jobs = 1);
nlohmann::json to_json(const Certificate& cert);

}  // namespace einsym
