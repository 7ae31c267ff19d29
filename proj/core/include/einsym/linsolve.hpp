#pragma once

// Exact linear algebra over Q for the determining-equation deductions.

#include <cstddef>
#include <map>
#include <vector>

#include "einsym/expr.hpp"

namespace einsym {

using RationalRow = std::vector<Rational>;

// Incremental row echelon form. Rows are reduced on insertion, so arbitrarily
// many redundant rows cost no memory.
class RowEchelon {
 public:
  explicit RowEchelon(std::size_t cols) : cols_(cols) {}

  // Returns true when the row increased the rank.
  bool insert(RationalRow row);
  [[nodiscard]] bool in_span(RationalRow row) const;
  [[nodiscard]] std::size_t rank() const { return rows_.size(); }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool full_rank() const { return rows_.size() == cols_; }
  // Basis of {v : row . v = 0 for every inserted row}.
  [[nodiscard]] std::vector<RationalRow> kernel() const;
  // Columns without a pivot.
  [[nodiscard]] std::vector<std::size_t> free_columns() const;

 private:
  std::size_t cols_;
  std::map<std::size_t, RationalRow> rows_;  // pivot column -> fully reduced row, pivot 1
};

// Equations linear and homogeneous in `unknowns`, split by the monomials of
// all remaining atoms into rows over Q.
struct LinearSystem {
  std::vector<VarId> unknowns;
  std::size_t equations = 0;  // number of input Exprs
  std::size_t rows = 0;       // number of extracted scalar rows
  RowEchelon echelon{0};
};

// Rows of one equation over the given unknown columns.
std::vector<RationalRow> split_rows(const Expr& eq, const std::vector<VarId>& unknowns);

// Throws std::invalid_argument if a term is not of degree one in the unknowns.
LinearSystem linear_system(const std::vector<Expr>& eqs, const std::vector<VarId>& unknowns);

// Generator-function atoms (kind Func) occurring in any of the expressions.
std::vector<VarId> function_atoms(const std::vector<Expr>& exprs);

// Whether every target is a Q-linear consequence of the equations, both
// split by the monomials of the non-function atoms.
struct SpanCheck {
  bool ok = true;
  std::size_t rows = 0;
  std::size_t rank = 0;
  std::vector<std::size_t> missing;  // indices of targets not implied
};
SpanCheck implied(const std::vector<Expr>& eqs, const std::vector<Expr>& targets);

}  // namespace einsym
