#include "einsym/expr.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace einsym {
namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool term_before(const Term& a, const Term& b) { return grlex_compare(a.mono, b.mono) > 0; }

}  // namespace

// ---- Monomial ---------------------------------------------------------------

Monomial::Monomial(VarId v, std::uint32_t e) {
  if (e > 0) factors_.push_back({v, e});
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].exp == 0) throw std::invalid_argument("Monomial: zero exponent");
    if (i > 0 && factors[i - 1].var >= factors[i].var) {
      throw std::invalid_argument("Monomial: factors not strictly increasing");
    }
  }
  Monomial m;
  m.factors_ = std::move(factors);
  return m;
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const Factor& f : factors_) d += f.exp;
  return d;
}

std::uint32_t Monomial::exponent(VarId v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const Factor& f, VarId x) { return f.var < x; });
  return (it != factors_.end() && it->var == v) ? it->exp : 0;
}

Monomial Monomial::without_one(VarId v) const {
  Monomial out;
  out.factors_.reserve(factors_.size());
  bool found = false;
  for (const Factor& f : factors_) {
    if (f.var == v) {
      found = true;
      if (f.exp > 1) out.factors_.push_back({f.var, f.exp - 1});
    } else {
      out.factors_.push_back(f);
    }
  }
  assert(found);
  (void)found;
  return out;
}

std::optional<Monomial> Monomial::divide(const Monomial& divisor) const {
  Monomial out;
  std::size_t j = 0;
  for (const Factor& f : factors_) {
    if (j < divisor.factors_.size() && divisor.factors_[j].var < f.var) return std::nullopt;
    if (j < divisor.factors_.size() && divisor.factors_[j].var == f.var) {
      if (divisor.factors_[j].exp > f.exp) return std::nullopt;
      if (f.exp > divisor.factors_[j].exp) out.factors_.push_back({f.var, f.exp - divisor.factors_[j].exp});
      ++j;
    } else {
      out.factors_.push_back(f);
    }
  }
  if (j != divisor.factors_.size()) return std::nullopt;
  return out;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.factors_.empty()) return b;
  if (b.factors_.empty()) return a;
  Monomial out;
  out.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() && j != b.factors_.end()) {
    if (i->var < j->var) {
      out.factors_.push_back(*i++);
    } else if (j->var < i->var) {
      out.factors_.push_back(*j++);
    } else {
      out.factors_.push_back({i->var, i->exp + j->exp});
      ++i;
      ++j;
    }
  }
  out.factors_.insert(out.factors_.end(), i, a.factors_.end());
  out.factors_.insert(out.factors_.end(), j, b.factors_.end());
  return out;
}

std::size_t Monomial::hash() const {
  std::uint64_t h = 0x12345678abcdefULL;
  for (const Factor& f : factors_) h = mix64(h ^ f.var) + f.exp;
  return static_cast<std::size_t>(h);
}

std::string Monomial::str() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (const Factor& f : factors_) {
    if (!out.empty()) out += '*';
    out += var::name(f.var);
    if (f.exp > 1) out += '^' + std::to_string(f.exp);
  }
  return out;
}

int grlex_compare(const Monomial& a, const Monomial& b) {
  const auto da = a.degree();
  const auto db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  auto fa = a.factors();
  auto fb = b.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < fa.size() && j < fb.size()) {
    if (fa[i].var == fb[j].var) {
      if (fa[i].exp != fb[j].exp) return fa[i].exp > fb[j].exp ? 1 : -1;
      ++i;
      ++j;
    } else {
      return fa[i].var < fb[j].var ? 1 : -1;
    }
  }
  return 0;
}

// ---- Expr ---------------------------------------------------------------------

Expr::Expr(const Rational& c) {
  if (!c.is_zero()) terms_.push_back({Monomial(), c});
}

Expr Expr::variable(VarId v) { return monomial(Monomial(v)); }

Expr Expr::monomial(const Monomial& m, const Rational& c) {
  Expr e;
  if (!c.is_zero()) e.terms_.push_back({m, c});
  return e;
}

Expr Expr::from_terms(std::vector<Term> terms) {
  ExprBuilder b;
  for (Term& t : terms) b.add(std::move(t.mono), t.coeff);
  return b.build();
}

bool Expr::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

std::optional<Rational> Expr::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_[0].mono.is_one()) return terms_[0].coeff;
  return std::nullopt;
}

std::set<VarId> Expr::variables() const {
  std::set<VarId> out;
  for (const Term& t : terms_)
    for (const Factor& f : t.mono.factors()) out.insert(f.var);
  return out;
}

bool Expr::contains_if(const std::function<bool(VarId)>& pred) const {
  for (const Term& t : terms_)
    for (const Factor& f : t.mono.factors())
      if (pred(f.var)) return true;
  return false;
}

namespace {

std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const int c = grlex_compare(a[i].mono, b[j].mono);
    if (c > 0) {
      out.push_back(a[i++]);
    } else if (c < 0) {
      out.push_back(b[j++]);
      if (negate_b) out.back().coeff = -out.back().coeff;
    } else {
      Rational s = negate_b ? a[i].coeff - b[j].coeff : a[i].coeff + b[j].coeff;
      if (!s.is_zero()) out.push_back({a[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) {
    out.push_back(b[j]);
    if (negate_b) out.back().coeff = -out.back().coeff;
  }
  return out;
}

}  // namespace

Expr& Expr::operator+=(const Expr& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, false);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  if (o.terms_.empty()) return *this;
  terms_ = merge_terms(terms_, o.terms_, true);
  return *this;
}

Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }

Expr& Expr::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
  } else if (!c.is_one()) {
    for (Term& t : terms_) t.coeff *= c;
  }
  return *this;
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr out = a;
  out += b;
  return out;
}

Expr operator-(const Expr& a, const Expr& b) {
  Expr out = a;
  out -= b;
  return out;
}

Expr operator-(const Expr& a) {
  Expr out = a;
  for (Term& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.terms_.size() == 1) return b.times(a.terms_[0].mono, a.terms_[0].coeff);
  if (b.terms_.size() == 1) return a.times(b.terms_[0].mono, b.terms_[0].coeff);
  ExprBuilder builder;
  builder.add_product(a, b);
  return builder.build();
}

Expr operator*(const Expr& a, const Rational& c) {
  Expr out = a;
  out *= c;
  return out;
}

Expr Expr::pow(unsigned e) const {
  Expr result(1);
  Expr base = *this;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

Expr Expr::times(const Monomial& m, const Rational& c) const {
  Expr out;
  if (c.is_zero()) return out;
  out.terms_.reserve(terms_.size());
  // Multiplying by a fixed monomial preserves the grlex order.
  for (const Term& t : terms_) out.terms_.push_back({t.mono * m, t.coeff * c});
  return out;
}

// ---- ExprBuilder ----------------------------------------------------------------

void ExprBuilder::add(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = acc_.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void ExprBuilder::add(Monomial&& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = acc_.try_emplace(std::move(m), c);
  if (!inserted) it->second += c;
}

void ExprBuilder::add(const Expr& e, const Rational& scale) {
  if (scale.is_zero()) return;
  for (const Term& t : e.terms()) {
    auto [it, inserted] = acc_.try_emplace(t.mono);
    it->second.add_product(t.coeff, scale);
  }
}

void ExprBuilder::add_product(const Expr& e, const Monomial& m, const Rational& scale) {
  if (scale.is_zero()) return;
  for (const Term& t : e.terms()) {
    auto [it, inserted] = acc_.try_emplace(t.mono * m);
    it->second.add_product(t.coeff, scale);
  }
}

void ExprBuilder::add_product(const Expr& a, const Expr& b, const Rational& scale) {
  if (scale.is_zero() || a.is_zero() || b.is_zero()) return;
  const Expr& small = a.size() <= b.size() ? a : b;
  const Expr& large = a.size() <= b.size() ? b : a;
  for (const Term& s : small.terms()) {
    Rational c = s.coeff * scale;
    for (const Term& t : large.terms()) {
      auto [it, inserted] = acc_.try_emplace(s.mono * t.mono);
      it->second.add_product(c, t.coeff);
    }
  }
}

Expr ExprBuilder::build() {
  Expr out;
  out.terms_.reserve(acc_.size());
  for (auto& [m, c] : acc_) {
    if (!c.is_zero()) out.terms_.push_back({m, std::move(c)});
  }
  acc_.clear();
  std::sort(out.terms_.begin(), out.terms_.end(), term_before);
  return out;
}

// ---- operations -----------------------------------------------------------------

Expr add(const Expr& a, const Expr& b) { return a + b; }
Expr mul(const Expr& a, const Expr& b) { return a * b; }

Expr formal_diff(const Expr& p, VarId v) {
  ExprBuilder b;
  for (const Term& t : p.terms()) {
    const auto e = t.mono.exponent(v);
    if (e == 0) continue;
    b.add(t.mono.without_one(v), t.coeff * Rational(static_cast<long>(e)));
  }
  return b.build();
}

Expr derive(const Expr& p, const std::function<const Expr*(VarId)>& atom_derivative) {
  std::unordered_map<VarId, const Expr*> cache;
  ExprBuilder b;
  for (const Term& t : p.terms()) {
    for (const Factor& f : t.mono.factors()) {
      auto it = cache.find(f.var);
      if (it == cache.end()) it = cache.emplace(f.var, atom_derivative(f.var)).first;
      const Expr* d = it->second;
      if (d == nullptr || d->is_zero()) continue;
      b.add_product(*d, t.mono.without_one(f.var), t.coeff * Rational(static_cast<long>(f.exp)));
    }
  }
  return b.build();
}

Expr substitute(const Expr& p, const std::map<VarId, Expr>& map) {
  if (map.empty()) return p;
  std::map<std::pair<VarId, std::uint32_t>, Expr> powers;
  auto power = [&](VarId v, std::uint32_t e) -> const Expr& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it == powers.end()) it = powers.emplace(key, map.at(v).pow(e)).first;
    return it->second;
  };
  ExprBuilder b;
  for (const Term& t : p.terms()) {
    std::vector<Factor> kept;
    Expr piece(1);
    bool zero = false;
    for (const Factor& f : t.mono.factors()) {
      if (map.count(f.var) == 0U) {
        kept.push_back(f);
        continue;
      }
      const Expr& pw = power(f.var, f.exp);
      if (pw.is_zero()) {
        zero = true;
        break;
      }
      piece = piece * pw;
    }
    if (zero) continue;
    b.add_product(piece, Monomial::from_factors(std::move(kept)), t.coeff);
  }
  return b.build();
}

FracExpr substitute(const Expr& p, const std::map<VarId, FracExpr>& map, const Expr& det) {
  std::map<std::pair<VarId, std::uint32_t>, Expr> powers;
  std::vector<std::pair<Expr, unsigned>> parts;
  std::map<unsigned, Expr> det_powers;
  unsigned max_power = 0;
  for (const Term& t : p.terms()) {
    std::vector<Factor> kept;
    Expr piece(1);
    unsigned k = 0;
    bool zero = false;
    for (const Factor& f : t.mono.factors()) {
      auto mit = map.find(f.var);
      if (mit == map.end()) {
        kept.push_back(f);
        continue;
      }
      auto key = std::make_pair(f.var, f.exp);
      auto it = powers.find(key);
      if (it == powers.end()) it = powers.emplace(key, mit->second.num.pow(f.exp)).first;
      if (it->second.is_zero()) {
        zero = true;
        break;
      }
      piece = piece * it->second;
      k += mit->second.den_power * f.exp;
    }
    if (zero) continue;
    parts.emplace_back(piece.times(Monomial::from_factors(std::move(kept)), t.coeff), k);
    max_power = std::max(max_power, k);
  }
  ExprBuilder b;
  for (auto& [num, k] : parts) {
    const unsigned lift = max_power - k;
    if (lift == 0) {
      b.add(num);
      continue;
    }
    auto it = det_powers.find(lift);
    if (it == det_powers.end()) it = det_powers.emplace(lift, det.pow(lift)).first;
    b.add_product(num, it->second);
  }
  Expr num = b.build();
  const unsigned k = num.is_zero() ? 0U : max_power;
  return {std::move(num), k};
}

CoefficientMap coefficients(const Expr& p, const std::function<bool(VarId)>& selected) {
  std::unordered_map<Monomial, std::vector<Term>, MonomialHash> groups;
  for (const Term& t : p.terms()) {
    auto [sel, rest] = t.mono.split(selected);
    groups[std::move(sel)].push_back({std::move(rest), t.coeff});
  }
  CoefficientMap out;
  out.reserve(groups.size());
  for (auto& [m, terms] : groups) {
    // Terms arrive in grlex order of the full monomial; the remainders of a
    // single group need not be sorted, so rebuild canonically.
    out.emplace_back(m, Expr::from_terms(std::move(terms)));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return grlex_compare(a.first, b.first) > 0; });
  return out;
}

CoefficientMap coefficient_of(const Expr& p, const std::set<VarId>& selected) {
  return coefficients(p, [&](VarId v) { return selected.count(v) != 0U; });
}

Expr reassemble(const CoefficientMap& parts) {
  ExprBuilder b;
  for (const auto& [m, c] : parts) b.add_product(c, m, Rational(1));
  return b.build();
}

bool is_zero(const FracExpr& p) { return p.num.is_zero(); }

bool equal(const FracExpr& a, const FracExpr& b, const Expr& det) {
  if (a.den_power == b.den_power) return a.num == b.num;
  if (a.den_power < b.den_power) return a.num * det.pow(b.den_power - a.den_power) == b.num;
  return a.num == b.num * det.pow(a.den_power - b.den_power);
}

FracExpr add(const FracExpr& a, const FracExpr& b, const Expr& det) {
  const unsigned k = std::max(a.den_power, b.den_power);
  Expr na = a.den_power < k ? a.num * det.pow(k - a.den_power) : a.num;
  Expr nb = b.den_power < k ? b.num * det.pow(k - b.den_power) : b.num;
  Expr n = na + nb;
  return {n, n.is_zero() ? 0U : k};
}

FracExpr mul(const FracExpr& a, const FracExpr& b) {
  Expr n = a.num * b.num;
  return {n, n.is_zero() ? 0U : a.den_power + b.den_power};
}

std::optional<Expr> divide_exact(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("divide_exact: division by zero polynomial");
  Expr remainder = a;
  ExprBuilder quotient;
  const Term& lead = b.leading();
  const Rational lead_inv = lead.coeff.inverse();
  while (!remainder.is_zero()) {
    const Term& r = remainder.leading();
    auto q = r.mono.divide(lead.mono);
    if (!q) return std::nullopt;
    Rational c = r.coeff * lead_inv;
    quotient.add(*q, c);
    remainder -= b.times(*q, c);
  }
  return quotient.build();
}

FracExpr reduce(const FracExpr& p, const Expr& det) {
  FracExpr out = p;
  if (out.num.is_zero()) return {Expr(), 0};
  while (out.den_power > 0) {
    auto q = divide_exact(out.num, det);
    if (!q) break;
    out.num = std::move(*q);
    --out.den_power;
  }
  return out;
}

Rational evaluate(const Expr& p, const std::function<Rational(VarId)>& value) {
  std::unordered_map<VarId, Rational> cache;
  mpq_class total = 0;
  mpq_class term;
  for (const Term& t : p.terms()) {
    term = t.coeff.get();
    for (const Factor& f : t.mono.factors()) {
      auto it = cache.find(f.var);
      if (it == cache.end()) it = cache.emplace(f.var, value(f.var)).first;
      const Rational& v = it->second;
      if (f.exp == 1) {
        term *= v.get();
      } else {
        term *= v.pow(f.exp).get();
      }
    }
    total += term;
  }
  return Rational(std::move(total));
}

std::optional<Expr> monomial_ratio(const Expr& a, const Expr& b) {
  if (b.is_zero()) return std::nullopt;
  if (a.is_zero()) return Expr();
  auto m = a.leading().mono.divide(b.leading().mono);
  if (!m) return std::nullopt;
  Rational c = a.leading().coeff / b.leading().coeff;
  if (b.times(*m, c) != a) return std::nullopt;
  return Expr::monomial(*m, c);
}

}  // namespace einsym
