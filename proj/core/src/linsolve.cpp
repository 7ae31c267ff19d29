#include "einsym/linsolve.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace einsym {

bool RowEchelon::insert(RationalRow row) {
  if (row.size() != cols_) throw std::invalid_argument("row length does not match");
  for (const auto& [pivot, basis] : rows_) {
    if (row[pivot].is_zero()) continue;
    const Rational c = row[pivot];
    for (std::size_t j = pivot; j < cols_; ++j) {
      if (!basis[j].is_zero()) row[j] -= c * basis[j];
    }
  }
  auto lead = std::find_if(row.begin(), row.end(), [](const Rational& r) { return !r.is_zero(); });
  if (lead == row.end()) return false;
  const auto pivot = static_cast<std::size_t>(lead - row.begin());
  const Rational inv = Rational(1) / row[pivot];
  for (std::size_t j = pivot; j < cols_; ++j) row[j] *= inv;
  for (auto& [p, basis] : rows_) {
    if (basis[pivot].is_zero()) continue;
    const Rational c = basis[pivot];
    for (std::size_t j = pivot; j < cols_; ++j) {
      if (!row[j].is_zero()) basis[j] -= c * row[j];
    }
  }
  rows_.emplace(pivot, std::move(row));
  return true;
}

bool RowEchelon::in_span(RationalRow row) const {
  for (const auto& [pivot, basis] : rows_) {
    if (row[pivot].is_zero()) continue;
    const Rational c = row[pivot];
    for (std::size_t j = pivot; j < cols_; ++j) {
      if (!basis[j].is_zero()) row[j] -= c * basis[j];
    }
  }
  return std::all_of(row.begin(), row.end(), [](const Rational& r) { return r.is_zero(); });
}

std::vector<std::size_t> RowEchelon::free_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (!rows_.contains(j)) out.push_back(j);
  }
  return out;
}

std::vector<RationalRow> RowEchelon::kernel() const {
  std::vector<RationalRow> out;
  for (std::size_t f : free_columns()) {
    RationalRow v(cols_);
    v[f] = Rational(1);
    for (const auto& [pivot, basis] : rows_) v[pivot] = -basis[f];
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

std::vector<RationalRow> split_with(const Expr& e, const std::unordered_map<VarId, std::size_t>& column,
                                    std::size_t cols) {
  std::vector<RationalRow> rows;
  std::unordered_map<Monomial, std::size_t, MonomialHash> index;
  for (const Term& t : e.terms()) {
    auto [in, rest] = t.mono.split([&](VarId v) { return column.contains(v); });
    if (in.size() != 1 || in.degree() != 1) {
      throw std::invalid_argument("equation is not linear and homogeneous in the unknowns: " + e.str());
    }
    auto [it, fresh] = index.emplace(rest, rows.size());
    if (fresh) rows.emplace_back(cols);
    rows[it->second][column.at(in.factors()[0].var)] += t.coeff;
  }
  return rows;
}

std::unordered_map<VarId, std::size_t> columns_of(const std::vector<VarId>& unknowns) {
  std::unordered_map<VarId, std::size_t> column;
  for (std::size_t i = 0; i < unknowns.size(); ++i) column.emplace(unknowns[i], i);
  return column;
}

}  // namespace

std::vector<RationalRow> split_rows(const Expr& eq, const std::vector<VarId>& unknowns) {
  return split_with(eq, columns_of(unknowns), unknowns.size());
}

LinearSystem linear_system(const std::vector<Expr>& eqs, const std::vector<VarId>& unknowns) {
  LinearSystem sys;
  sys.unknowns = unknowns;
  sys.equations = eqs.size();
  sys.echelon = RowEchelon(unknowns.size());
  const auto column = columns_of(unknowns);
  for (const Expr& e : eqs) {
    for (auto& row : split_with(e, column, unknowns.size())) {
      ++sys.rows;
      if (!sys.echelon.full_rank()) sys.echelon.insert(std::move(row));
    }
  }
  return sys;
}

std::vector<VarId> function_atoms(const std::vector<Expr>& exprs) {
  std::set<VarId> atoms;
  for (const Expr& e : exprs) {
    for (VarId v : e.variables()) {
      if (var::kind(v) == VarKind::Func) atoms.insert(v);
    }
  }
  return {atoms.begin(), atoms.end()};
}

SpanCheck implied(const std::vector<Expr>& eqs, const std::vector<Expr>& targets) {
  std::vector<Expr> all = eqs;
  all.insert(all.end(), targets.begin(), targets.end());
  const std::vector<VarId> unknowns = function_atoms(all);
  const LinearSystem sys = linear_system(eqs, unknowns);
  SpanCheck out;
  out.rows = sys.rows;
  out.rank = sys.echelon.rank();
  const auto column = columns_of(unknowns);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (auto& row : split_with(targets[i], column, unknowns.size())) {
      if (!sys.echelon.in_span(std::move(row))) {
        out.ok = false;
        out.missing.push_back(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace einsym
