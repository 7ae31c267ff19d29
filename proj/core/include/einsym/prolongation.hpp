#pragma once

// Generator vector fields v = H^m d/dx^m + Phi_(mn) d/dg_mn, the total
// derivative, the prolongation coefficients Phi_{tga} and Phi_{abgd}, and the
// action of the second prolongation on the vacuum system.

#include <vector>

#include "einsym/expr.hpp"
#include "einsym/geometry.hpp"
#include "einsym/jetspace.hpp"

namespace einsym {

// Which variables the unknown generator functions depend on. Phi always
// depends on (x, g); PhiT on x and its own metric component; f, A and B on x.
struct Dependence {
  bool h_on_metric = true;
};

struct VectorField {
  int dim = 0;
  std::vector<Expr> H;  // H[eta - 1]
  SymmetricArray<Expr> Phi;
  Dependence dep;

  VectorField() = default;
  explicit VectorField(int n) : dim(n), H(n), Phi(n) {}

  [[nodiscard]] const Expr& h(int eta) const { return H.at(eta - 1); }
  [[nodiscard]] const Expr& phi(int mu, int nu) const { return Phi.at(mu, nu); }

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator*(const Rational& c, const VectorField& a);
  friend bool operator==(const VectorField& a, const VectorField& b);
};

// H^eta = H[eta], Phi_mn = Phi[m,n] as underived function atoms.
VectorField generic_field(const MetricContext& ctx, Dependence dep = {});

// Explicit x-derivative: function atoms gain an x-derivative, coordinates
// x_b give delta, metric and jet atoms are constants.
Expr partial_x(const Expr& p, int alpha);
// Partial derivative with respect to g_mn (m <= n): g atoms give delta,
// inverse-metric atoms give -X^{ab mn}, function atoms gain a metric
// derivative when they depend on g_mn.
Expr partial_g(const MetricContext& ctx, const Expr& p, int mu, int nu, const Dependence& dep = {});
// D_alpha on expressions over jet atoms of order <= 2 and function atoms.
Expr total_derivative(const MetricContext& ctx, const Expr& p, int alpha, const Dependence& dep = {});

// Phi_{tau gamma alpha} from the expanded formula.
Expr phi_first(const MetricContext& ctx, const VectorField& vf, int tau, int gamma, int alpha);
// D_a(Phi_tg - H^e d_e g_tg) + H^e d_a d_e g_tg.
Expr phi_first_total(const MetricContext& ctx, const VectorField& vf, int tau, int gamma, int alpha);
// Phi_{alpha beta gamma delta} from the expanded formula.
Expr phi_second(const MetricContext& ctx, const VectorField& vf, int alpha, int beta, int gamma, int delta);
// D_g D_d(Phi_ab - H^e d_e g_ab) + H^e d_g d_d d_e g_ab; third-order atoms
// must cancel, otherwise std::logic_error.
Expr phi_second_total(const MetricContext& ctx, const VectorField& vf, int alpha, int beta, int gamma, int delta);

enum class Route { Expanded, Total };

// All prolongation coefficients of one field, indexed canonically.
class ProlongationTables {
 public:
  ProlongationTables(const MetricContext& ctx, const VectorField& vf, Route route = Route::Expanded,
                     unsigned jobs = 1);

  [[nodiscard]] const Expr& first(int tau, int gamma, int alpha) const;
  [[nodiscard]] const Expr& second(int alpha, int beta, int gamma, int delta) const;
  [[nodiscard]] const VectorField& field() const { return vf_; }

 private:
  int n_;
  std::size_t pairs_;
  VectorField vf_;
  std::vector<Expr> first_;   // [pair(tau,gamma)][alpha]
  std::vector<Expr> second_;  // [pair(alpha,beta)][pair(gamma,delta)]
};

struct ProlongedAction {
  int dim = 0;
  SymmetricArray<Expr> action;
  [[nodiscard]] const Expr& at(int alpha, int beta) const { return action.at(alpha, beta); }
};

// The assembled action on R_ab - lam g_ab with unrestricted sums, upper-index
// Phi^{gd} = g^{gk} g^{dl} Phi_kl.
ProlongedAction prolong_einstein(const MetricContext& ctx, const ProlongationTables& tables, unsigned jobs = 1);
ProlongedAction prolong_einstein(const MetricContext& ctx, const VectorField& vf, unsigned jobs = 1);
// A single component of the assembled action.
Expr prolong_einstein_component(const MetricContext& ctx, const ProlongationTables& tables, int alpha, int beta);

// The second prolongation applied term by term to an arbitrary target over
// jet atoms of order <= 2, with sums over canonical atoms only.
Expr prolong_direct(const MetricContext& ctx, const ProlongationTables& tables, const Expr& target);
Expr prolong_direct(const MetricContext& ctx, const VectorField& vf, const Expr& target);

}  // namespace einsym
