#pragma once

// Canonical multivariate polynomials with exact rational coefficients.
//
// An Expr is an immutable, sorted list of (Monomial, nonzero Rational) terms.
// Terms are ordered by graded lexicographic order over the global VarId order
// (leading term first), so two Exprs are equal iff their term lists are equal.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "einsym/rational.hpp"
#include "einsym/var.hpp"

namespace einsym {

struct Factor {
  VarId var;
  std::uint32_t exp;
  friend bool operator==(const Factor&, const Factor&) = default;
};

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(VarId v, std::uint32_t e = 1);
  // Factors must be strictly increasing in var with positive exponents.
  static Monomial from_factors(std::vector<Factor> factors);

  [[nodiscard]] bool is_one() const { return factors_.empty(); }
  [[nodiscard]] std::uint32_t degree() const;
  [[nodiscard]] std::uint32_t exponent(VarId v) const;
  [[nodiscard]] std::span<const Factor> factors() const { return factors_; }
  [[nodiscard]] std::size_t size() const { return factors_.size(); }

  // Splits into (factors selected by pred, remaining factors).
  template <class Pred>
  [[nodiscard]] std::pair<Monomial, Monomial> split(Pred&& pred) const {
    Monomial in;
    Monomial out;
    for (const Factor& f : factors_) (pred(f.var) ? in : out).factors_.push_back(f);
    return {std::move(in), std::move(out)};
  }

  // Monomial with one power of v removed (v must be present).
  [[nodiscard]] Monomial without_one(VarId v) const;
  // Exact quotient, or nullopt when `divisor` does not divide *this.
  [[nodiscard]] std::optional<Monomial> divide(const Monomial& divisor) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

  [[nodiscard]] std::size_t hash() const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<Factor> factors_;
};

// Graded lexicographic comparison: negative, zero or positive.
int grlex_compare(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

struct Term {
  Monomial mono;
  Rational coeff;
  friend bool operator==(const Term&, const Term&) = default;
};

class Expr {
 public:
  Expr() = default;
  Expr(const Rational& c);  // NOLINT(google-explicit-constructor)
  Expr(long c) : Expr(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Expr variable(VarId v);
  static Expr monomial(const Monomial& m, const Rational& c = Rational(1));
  // Builds a canonical Expr from arbitrary (possibly repeated, zero) terms.
  static Expr from_terms(std::vector<Term> terms);

  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] std::optional<Rational> constant_value() const;
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] std::span<const Term> terms() const { return terms_; }
  [[nodiscard]] const Term& leading() const { return terms_.front(); }
  [[nodiscard]] std::set<VarId> variables() const;
  [[nodiscard]] bool contains_if(const std::function<bool(VarId)>& pred) const;

  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator*=(const Rational& c);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Rational& c);
  friend Expr operator*(const Rational& c, const Expr& a) { return a * c; }
  friend bool operator==(const Expr&, const Expr&) = default;

  [[nodiscard]] Expr pow(unsigned e) const;
  [[nodiscard]] Expr times(const Monomial& m, const Rational& c) const;

  // Canonical text form, see serialize.hpp.
  [[nodiscard]] std::string str() const;

 private:
  friend class ExprBuilder;
  std::vector<Term> terms_;  // sorted, leading (largest) term first
};

// Hash-based accumulator for building large sums of products.
class ExprBuilder {
 public:
  void add(const Monomial& m, const Rational& c);
  void add(Monomial&& m, const Rational& c);
  void add(const Expr& e, const Rational& scale = Rational(1));
  // this += scale * m * e
  void add_product(const Expr& e, const Monomial& m, const Rational& scale);
  // this += a * b
  void add_product(const Expr& a, const Expr& b, const Rational& scale = Rational(1));
  [[nodiscard]] Expr build();
  [[nodiscard]] std::size_t pending() const { return acc_.size(); }

 private:
  std::unordered_map<Monomial, Rational, MonomialHash> acc_;
};

// Polynomial over det(g)^k denominators: value = num / det^den_power.
struct FracExpr {
  Expr num;
  unsigned den_power = 0;

  FracExpr() = default;
  FracExpr(Expr n, unsigned k = 0) : num(std::move(n)), den_power(k) {}  // NOLINT
};

// ---- core operations ------------------------------------------------------

Expr add(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);

// Partial derivative treating every other atom as an independent constant.
Expr formal_diff(const Expr& p, VarId v);

// Applies a derivation determined by its action on atoms. `atom_derivative`
// returns nullptr for atoms annihilated by the derivation. Results for each
// atom are requested once per call.
Expr derive(const Expr& p, const std::function<const Expr*(VarId)>& atom_derivative);

// Simultaneous polynomial substitution; unmapped atoms are kept.
Expr substitute(const Expr& p, const std::map<VarId, Expr>& map);

// Simultaneous substitution by det-denominated fractions. `det` is the
// polynomial standing for det(g); the result is brought to the common
// denominator det^k with k the largest power any term needs.
FracExpr substitute(const Expr& p, const std::map<VarId, FracExpr>& map, const Expr& det);

// Groups p by its monomials in the selected atoms: p == sum(m * coeff) and no
// coefficient contains a selected atom. Entries are sorted by the selected
// monomial, leading first.
using CoefficientMap = std::vector<std::pair<Monomial, Expr>>;
CoefficientMap coefficient_of(const Expr& p, const std::set<VarId>& selected);
CoefficientMap coefficients(const Expr& p, const std::function<bool(VarId)>& selected);
// Inverse of `coefficients`.
Expr reassemble(const CoefficientMap& parts);

bool is_zero(const FracExpr& p);
// a == b after cross-multiplication by the appropriate powers of det.
bool equal(const FracExpr& a, const FracExpr& b, const Expr& det);
FracExpr add(const FracExpr& a, const FracExpr& b, const Expr& det);
FracExpr mul(const FracExpr& a, const FracExpr& b);

// Exact polynomial division; nullopt when b does not divide a.
std::optional<Expr> divide_exact(const Expr& a, const Expr& b);
// Cancels common powers of det from numerator and denominator.
FracExpr reduce(const FracExpr& p, const Expr& det);

// Evaluates with every atom supplied by `value`.
Rational evaluate(const Expr& p, const std::function<Rational(VarId)>& value);

// If a == c * m * b for a rational c and monomial m, returns c*m.
std::optional<Expr> monomial_ratio(const Expr& a, const Expr& b);

}  // namespace einsym
