#pragma once

// Term classes of the prolonged action, extraction of the determining
// equations from the coefficients of independent jet monomials, and the
// deductions that reduce the generator.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "einsym/expr.hpp"
#include "einsym/jetspace.hpp"
#include "einsym/linsolve.hpp"
#include "einsym/prolongation.hpp"
#include "einsym/report.hpp"

namespace einsym {

// Degree pattern in (first-derivative, second-derivative) atoms.
enum class TermClass { None, DG, DG_DG, DG_DG_DG, DDG, DG_DDG };

std::string_view class_name(TermClass c);
std::optional<TermClass> class_from_name(std::string_view name);

class UnexpectedTermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact partition of p; the parts sum to p.
std::map<TermClass, Expr> classify(const Expr& p);

struct Constraint {
  TermClass cls = TermClass::None;
  std::vector<int> indices;
  Expr expr;  // must vanish
  std::string source;
};

struct DeterminingSystem {
  int dim = 0;
  TermClass cls = TermClass::None;
  std::vector<Constraint> constraints;  // lexicographic in the index tuple
};

// Generator-function derivative atoms.
Expr h_dg(int eta, int mu, int nu);              // dH^eta / dg_mn
Expr h_dx(int eta, int alpha);                   // d_alpha H^eta
Expr phi_dg(int a, int b, int mu, int nu);       // dPhi_ab / dg_mn
Expr phi_dx(int a, int b, int alpha);            // d_alpha Phi_ab
std::vector<VarId> h_dg_atoms(const MetricContext& ctx);

// dd[s,s]g[r,s] for every r, s (the mixed class uses these with a D1 factor).
std::vector<VarId> dg_ddg_atoms(const MetricContext& ctx);
// dd[s,e]g[s,s] for every s, e.
std::vector<VarId> ddg_diag_atoms(const MetricContext& ctx);
// dd[s,s]g[r,s] for r != s.
std::vector<VarId> ddg_offdiag_atoms(const MetricContext& ctx);

// Coefficients of d_g g_mn * d_s d_s g_rs in the action on the system for a
// generic field; indices (alpha, beta, gamma, mu, nu, rho, sigma).
DeterminingSystem extract_dg_ddg(const MetricContext& ctx, unsigned jobs = 1);
// The closed-form coefficient for the same index tuple.
Expr dg_ddg_formula(const MetricContext& ctx, int alpha, int beta, int gamma, int mu, int nu, int rho, int sigma);

// Constraint-set lookup by index tuple.
const Constraint* find_constraint(const DeterminingSystem& sys, const std::vector<int>& indices,
                                  std::string_view source = {});

// Certifies that every dH^g/dg_rs vanishes: the dimension-specific path
// through single-unknown instances plus a rank check on the whole family.
ProofReport deduce_h_independence(const MetricContext& ctx, unsigned jobs = 1);

// H independent of g either from the start or by zeroing dH/dg afterwards.
enum class DdgRoute { XOnlyField, ZeroAfter };

// Coefficients of the absent second-derivative atoms in the action:
// d_s d_e g_ss with indices (alpha, beta, eta, sigma) and d_s d_s g_rs,
// r != s, with indices (alpha, beta, rho, sigma). Sources are equation labels.
DeterminingSystem extract_ddg(const MetricContext& ctx, unsigned jobs = 1, DdgRoute route = DdgRoute::XOnlyField);
Expr ddg_diag_formula(const MetricContext& ctx, int alpha, int beta, int eta, int sigma);
Expr ddg_offdiag_formula(const MetricContext& ctx, int alpha, int beta, int rho, int sigma);

// dPhi/dg atoms fixed by the second-derivative analysis, as rewrite rules.
// `labels` selects the families by equation label.
std::map<VarId, Expr> phi_metric_rules(const MetricContext& ctx, const std::vector<std::string>& labels);
Expr apply_rules(const Expr& p, const std::map<VarId, Expr>& rules);

// Index-case label of a constraint in the two second-derivative families,
// e.g. "(iv)"; the instances used for the deductions carry equation labels.
std::string ddg_diag_case(int alpha, int beta, int eta, int sigma);
std::string ddg_offdiag_case(int alpha, int beta, int rho, int sigma);

enum class Sufficiency { DgDdg, DdgDiag, DdgOffdiag };
ProofReport verify_sufficiency(const MetricContext& ctx, Sufficiency which, unsigned jobs = 1);

ProofReport deduce_phi_structure(const MetricContext& ctx, unsigned jobs = 1);

// PhiT_ab = Phi_ab + g_ag d_b H^g + g_gb d_a H^g.
SymmetricArray<Expr> tilde_phi(const MetricContext& ctx, const VectorField& vf);

// The field with H = f(x) and Phi_ab = PhiT_ab(x, g_ab) - g_ag d_b f^g - g_gb d_a f^g.
VectorField reduced_field(const MetricContext& ctx);

// Coefficients of Gamma_{l,(mn)} in the first-derivative class of the action
// of the reduced field; indices (alpha, beta, lambda, mu, nu).
DeterminingSystem extract_dg(const MetricContext& ctx, unsigned jobs = 1);
// Same, for an arbitrary field whose lower classes already vanish.
DeterminingSystem extract_dg(const MetricContext& ctx, const VectorField& vf, unsigned jobs = 1);
// g^{l r} (d_b PhiT_ra + d_a PhiT_rb - d_r PhiT_ab).
Expr dg_reduced_formula(const MetricContext& ctx, int alpha, int beta, int lambda);

ProofReport deduce_dg(const MetricContext& ctx, unsigned jobs = 1);

}  // namespace einsym
