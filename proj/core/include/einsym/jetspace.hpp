#pragma once

// Dimension-dependent view of the jet space: index ranges, variable
// enumeration, the X and G symbols, and the exact inverse metric.

#include <vector>

#include "einsym/expr.hpp"
#include "einsym/var.hpp"

namespace einsym {

enum class InverseMode { Formal, Exact };

class MetricContext {
 public:
  // Largest dimension for which the symbolic adjugate inverse is built.
  static constexpr int kExactInverseCap = 4;

  explicit MetricContext(int dim, InverseMode mode = InverseMode::Formal);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] InverseMode inverse_mode() const { return mode_; }
  [[nodiscard]] bool has_exact_inverse() const { return dim_ <= kExactInverseCap; }

  // Throws std::out_of_range unless 1 <= i <= dim.
  void check_index(int i) const;
  // Canonical pairs (mu <= nu) in variable order.
  [[nodiscard]] const std::vector<IndexPair>& pairs() const { return pairs_; }

  // det(g) as a polynomial in the metric atoms.
  [[nodiscard]] const Expr& det() const;
  // g^{mu nu} = adj(g)_{mu nu} / det(g).
  [[nodiscard]] const FracExpr& inverse(int mu, int nu) const;
  // Substitution map gi[mu,nu] -> adj/det for every pair.
  [[nodiscard]] const std::map<VarId, FracExpr>& inverse_map() const;

  // Replaces inverse-metric atoms by adj/det in Exact mode; identity otherwise.
  [[nodiscard]] FracExpr realize(const Expr& p) const;

 private:
  int dim_;
  InverseMode mode_;
  std::vector<IndexPair> pairs_;
  Expr det_;
  std::vector<FracExpr> inverse_;  // row-major dim x dim
  std::map<VarId, FracExpr> inverse_map_;
};

// Values indexed by an unordered index pair, stored once per mu <= nu.
template <class T>
class SymmetricArray {
 public:
  SymmetricArray() = default;
  explicit SymmetricArray(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * (dim + 1) / 2)) {}

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] static std::size_t slot(int dim, int a, int b) {
    if (a > b) std::swap(a, b);
    // pairs (1,1) (1,2) .. (1,N) (2,2) ..
    return static_cast<std::size_t>((a - 1) * dim - (a - 1) * (a - 2) / 2 + (b - a));
  }
  T& at(int a, int b) { return data_.at(slot(dim_, a, b)); }
  const T& at(int a, int b) const { return data_.at(slot(dim_, a, b)); }
  [[nodiscard]] std::vector<T>& values() { return data_; }
  [[nodiscard]] const std::vector<T>& values() const { return data_; }

 private:
  int dim_ = 0;
  std::vector<T> data_;
};

// Canonical atom for raw (possibly unsorted) indices. `raw` holds the
// derivative indices followed by the metric pair, e.g. {k, l, mu, nu} for D2.
VarId canon(const MetricContext& ctx, VarKind kind, const std::vector<int>& raw);

// All metric atoms of jet order 0..3 in variable order.
std::vector<VarId> enumerate_vars(const MetricContext& ctx, int order);
// All inverse-metric atoms gi[mu,nu], mu <= nu.
std::vector<VarId> inverse_vars(const MetricContext& ctx);

inline Expr kronecker(int a, int b) { return Expr(a == b ? 1L : 0L); }

// X^{mu nu kappa lambda} over inverse-metric atoms.
Expr x_symbol_upper(const MetricContext& ctx, int mu, int nu, int kappa, int lambda);
// X_{mu nu}^{kappa lambda}: a rational constant.
Expr x_symbol_mixed(const MetricContext& ctx, int mu, int nu, int kappa, int lambda);
// X_alpha^{nu kappa lambda}: first index lowered.
Expr x_symbol_one_lowered(const MetricContext& ctx, int alpha, int nu, int kappa, int lambda);
// G^{rho sigma} = g^{rho sigma} on the diagonal, 2 g^{rho sigma} off it.
Expr g_cap_symbol(const MetricContext& ctx, int rho, int sigma);

// True when p vanishes once the inverse-metric atoms satisfy g^{mu k} g_{k nu}
// = delta. Each coefficient of the non-metric atoms is tested separately.
bool is_zero_mod_inverse(const MetricContext& ctx, const Expr& p);
// The same reduction, returning p as a single fraction over det(g)^k.
FracExpr reduce_mod_inverse(const MetricContext& ctx, const Expr& p);

bool is_metric_atom(VarId v);  // g or gi
bool is_jet_derivative(VarId v);  // D1, D2 or D3

}  // namespace einsym

namespace einsym::sym {

inline Expr g(int a, int b) { return Expr::variable(var::metric(a, b)); }
inline Expr gi(int a, int b) { return Expr::variable(var::inv_metric(a, b)); }
inline Expr d1(int k, int a, int b) { return Expr::variable(var::d1(k, a, b)); }
inline Expr d2(int k, int l, int a, int b) { return Expr::variable(var::d2(k, l, a, b)); }
inline Expr x(int i) { return Expr::variable(var::coord(i)); }
inline Expr lam() { return Expr::variable(var::lambda()); }

}  // namespace einsym::sym
