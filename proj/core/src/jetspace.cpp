#include "einsym/jetspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace einsym {
namespace {

// Determinant of the symbolic metric restricted to the given rows/cols, by
// Laplace expansion along the first row.
Expr minor_det(const std::vector<int>& rows, const std::vector<int>& cols) {
  if (rows.size() == 1) return Expr::variable(var::metric(rows[0], cols[0]));
  ExprBuilder b;
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::vector<int> sub_cols;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k != c) sub_cols.push_back(cols[k]);
    }
    const Rational sign((c % 2 == 0) ? 1 : -1);
    b.add_product(Expr::variable(var::metric(rows[0], cols[c])), minor_det(sub_rows, sub_cols), sign);
  }
  return b.build();
}

}  // namespace

MetricContext::MetricContext(int dim, InverseMode mode) : dim_(dim), mode_(mode) {
  if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
  if (dim > kMaxIndex) throw std::invalid_argument("dimension too large");
  for (int a = 1; a <= dim; ++a) {
    for (int b = a; b <= dim; ++b) pairs_.emplace_back(a, b);
  }
  if (!has_exact_inverse()) return;
  std::vector<int> all(dim);
  for (int i = 0; i < dim; ++i) all[i] = i + 1;
  det_ = minor_det(all, all);
  inverse_.resize(static_cast<std::size_t>(dim) * dim);
  for (int r = 1; r <= dim; ++r) {
    for (int c = 1; c <= dim; ++c) {
      // adj(g)_{rc} = (-1)^{r+c} * minor with row c and column r removed.
      std::vector<int> rows;
      std::vector<int> cols;
      for (int i = 1; i <= dim; ++i) {
        if (i != c) rows.push_back(i);
        if (i != r) cols.push_back(i);
      }
      Expr adj = minor_det(rows, cols) * Rational((r + c) % 2 == 0 ? 1 : -1);
      inverse_[(r - 1) * dim + (c - 1)] = FracExpr(std::move(adj), 1);
    }
  }
  for (auto [a, b] : pairs_) inverse_map_.emplace(var::inv_metric(a, b), inverse(a, b));
}

void MetricContext::check_index(int i) const {
  if (i < 1 || i > dim_) {
    throw std::out_of_range("index " + std::to_string(i) + " outside [1.." + std::to_string(dim_) + "]");
  }
}

const Expr& MetricContext::det() const {
  if (!has_exact_inverse()) throw std::logic_error("exact inverse not available above dimension 4");
  return det_;
}

const FracExpr& MetricContext::inverse(int mu, int nu) const {
  check_index(mu);
  check_index(nu);
  if (!has_exact_inverse()) throw std::logic_error("exact inverse not available above dimension 4");
  return inverse_[(mu - 1) * dim_ + (nu - 1)];
}

const std::map<VarId, FracExpr>& MetricContext::inverse_map() const {
  if (!has_exact_inverse()) throw std::logic_error("exact inverse not available above dimension 4");
  return inverse_map_;
}

FracExpr MetricContext::realize(const Expr& p) const {
  if (mode_ == InverseMode::Formal) return FracExpr(p);
  return substitute(p, inverse_map(), det());
}

VarId canon(const MetricContext& ctx, VarKind kind, const std::vector<int>& raw) {
  for (int i : raw) ctx.check_index(i);
  auto need = [&](std::size_t n) {
    if (raw.size() != n) throw std::invalid_argument("canon: wrong number of indices");
  };
  switch (kind) {
    case VarKind::Metric: need(2); return var::metric(raw[0], raw[1]);
    case VarKind::InvMetric: need(2); return var::inv_metric(raw[0], raw[1]);
    case VarKind::D1: need(3); return var::d1(raw[0], raw[1], raw[2]);
    case VarKind::D2: need(4); return var::d2(raw[0], raw[1], raw[2], raw[3]);
    case VarKind::D3: need(5); return var::d3(raw[0], raw[1], raw[2], raw[3], raw[4]);
    case VarKind::Coord: need(1); return var::coord(raw[0]);
    case VarKind::Lambda: need(0); return var::lambda();
    default: throw std::invalid_argument("canon: unsupported kind");
  }
}

std::vector<VarId> enumerate_vars(const MetricContext& ctx, int order) {
  const int n = ctx.dim();
  std::vector<VarId> out;
  for (auto [a, b] : ctx.pairs()) {
    switch (order) {
      case 0: out.push_back(var::metric(a, b)); break;
      case 1:
        for (int k = 1; k <= n; ++k) out.push_back(var::d1(k, a, b));
        break;
      case 2:
        for (int k = 1; k <= n; ++k) {
          for (int l = k; l <= n; ++l) out.push_back(var::d2(k, l, a, b));
        }
        break;
      case 3:
        for (int k = 1; k <= n; ++k) {
          for (int l = k; l <= n; ++l) {
            for (int e = l; e <= n; ++e) out.push_back(var::d3(k, l, e, a, b));
          }
        }
        break;
      default: throw std::invalid_argument("enumerate_vars: order must be 0..3");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VarId> inverse_vars(const MetricContext& ctx) {
  std::vector<VarId> out;
  for (auto [a, b] : ctx.pairs()) out.push_back(var::inv_metric(a, b));
  return out;
}

Expr x_symbol_upper(const MetricContext& ctx, int mu, int nu, int kappa, int lambda) {
  for (int i : {mu, nu, kappa, lambda}) ctx.check_index(i);
  auto gi = [](int a, int b) { return Expr::variable(var::inv_metric(a, b)); };
  Expr out = gi(mu, kappa) * gi(nu, lambda);
  if (kappa != lambda) out += gi(mu, lambda) * gi(nu, kappa);
  return out;
}

Expr x_symbol_mixed(const MetricContext& ctx, int mu, int nu, int kappa, int lambda) {
  for (int i : {mu, nu, kappa, lambda}) ctx.check_index(i);
  long v = (mu == kappa && nu == lambda) ? 1 : 0;
  if (kappa != lambda && mu == lambda && nu == kappa) ++v;
  return Expr(v);
}

Expr x_symbol_one_lowered(const MetricContext& ctx, int alpha, int nu, int kappa, int lambda) {
  for (int i : {alpha, nu, kappa, lambda}) ctx.check_index(i);
  auto gi = [](int a, int b) { return Expr::variable(var::inv_metric(a, b)); };
  Expr out;
  if (alpha == kappa) out += gi(nu, lambda);
  if (kappa != lambda && alpha == lambda) out += gi(nu, kappa);
  return out;
}

Expr g_cap_symbol(const MetricContext& ctx, int rho, int sigma) {
  ctx.check_index(rho);
  ctx.check_index(sigma);
  Expr g = Expr::variable(var::inv_metric(rho, sigma));
  return rho == sigma ? g : g * Rational(2);
}

bool is_metric_atom(VarId v) {
  const VarKind k = var::kind(v);
  return k == VarKind::Metric || k == VarKind::InvMetric;
}

bool is_jet_derivative(VarId v) {
  const VarKind k = var::kind(v);
  return k == VarKind::D1 || k == VarKind::D2 || k == VarKind::D3;
}

bool is_zero_mod_inverse(const MetricContext& ctx, const Expr& p) {
  if (p.is_zero()) return true;
  const bool has_inverse = p.contains_if([](VarId v) { return var::kind(v) == VarKind::InvMetric; });
  if (!has_inverse) return false;
  for (const auto& [mono, coeff] : coefficients(p, [](VarId v) { return !is_metric_atom(v); })) {
    if (!substitute(coeff, ctx.inverse_map(), ctx.det()).num.is_zero()) return false;
  }
  return true;
}

FracExpr reduce_mod_inverse(const MetricContext& ctx, const Expr& p) {
  return reduce(substitute(p, ctx.inverse_map(), ctx.det()), ctx.det());
}

}  // namespace einsym
