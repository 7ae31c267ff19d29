#pragma once

// Small hand-rolled random generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "einsym/expr.hpp"
#include "einsym/jetspace.hpp"

namespace einsym::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  Rational rational(int height = 9) {
    const int num = uniform(-height, height);
    const int den = uniform(1, height);
    return {num, den};
  }

  // A variable drawn from a small pool mixing several atom kinds.
  VarId atom(int dim = 3) {
    const int a = uniform(1, dim);
    const int b = uniform(1, dim);
    switch (uniform(0, 5)) {
      case 0: return var::metric(a, b);
      case 1: return var::inv_metric(a, b);
      case 2: return var::d1(uniform(1, dim), a, b);
      case 3: return var::coord(a);
      case 4: return var::H(a);
      default: return var::d2(uniform(1, dim), uniform(1, dim), a, b);
    }
  }

  Monomial monomial(int max_factors = 3, int dim = 3) {
    Expr e(1);
    const int k = uniform(0, max_factors);
    for (int i = 0; i < k; ++i) e *= Expr::variable(atom(dim)).pow(static_cast<unsigned>(uniform(1, 2)));
    return e.terms().front().mono;
  }

  Expr expr(int max_terms = 5, int max_factors = 3, int dim = 3) {
    std::vector<Term> terms;
    const int k = uniform(0, max_terms);
    for (int i = 0; i < k; ++i) terms.push_back({monomial(max_factors, dim), rational()});
    return Expr::from_terms(std::move(terms));
  }

  // Polynomial in coordinates and metric components only.
  Expr xg_expr(int dim, int max_terms = 4) {
    std::vector<Term> terms;
    const int k = uniform(1, max_terms);
    for (int i = 0; i < k; ++i) {
      Expr m(1);
      const int f = uniform(0, 2);
      for (int j = 0; j < f; ++j) {
        const int a = uniform(1, dim);
        m *= Expr::variable(coin() ? var::coord(a) : var::metric(a, uniform(1, dim)));
      }
      terms.push_back({m.terms().front().mono, rational()});
    }
    return Expr::from_terms(std::move(terms));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace einsym::testing
