#pragma once

// Exact evaluation at random rational points. The inverse metric and a
// reference Ricci tensor are computed numerically from the sampled values,
// independently of the symbolic code.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "einsym/expr.hpp"
#include "einsym/jetspace.hpp"

namespace einsym {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleOptions {
  int height = 20;               // numerators in [-height, height], denominators in [1, height]
  Rational min_det{1, 100};      // |det g| lower bound
  int budget = 1000;             // rejection attempts
};

struct PointAssignment {
  std::uint64_t seed = 0;
  std::map<VarId, Rational> values;

  // Throws OracleError for an unassigned atom.
  [[nodiscard]] const Rational& at(VarId v) const;
};

// Metric block with |det| bounded below, its exact inverse, every first and
// second jet atom, and every other atom occurring in `cover`. Deterministic
// in the seed.
PointAssignment sample(const MetricContext& ctx, std::uint64_t seed, const std::vector<Expr>& cover = {},
                       const SampleOptions& opt = {});

Rational eval(const Expr& p, const PointAssignment& pt);
// num / det^k with det evaluated from the metric block.
Rational eval(const MetricContext& ctx, const FracExpr& p, const PointAssignment& pt);

// Ricci tensor from Christoffel symbols of the second kind, evaluated
// directly on the point's metric and derivative values.
Rational reference_ricci(const MetricContext& ctx, const PointAssignment& pt, int alpha, int beta);

// dR_ab / dg_mn through the chain rule, every term evaluated at the point:
// formal partials in g and g^{-1}, the latter weighted by dg^{ab}/dg_mn.
Rational chain_rule_d0(const MetricContext& ctx, const Expr& ricci_ab, int mu, int nu, const PointAssignment& pt);

struct NamedIdentity {
  std::string name;
  Expr expr;  // zero modulo the inverse relations
};

// Identities asserted zero by the symbolic modules for the given target:
// "ricci", "dricci", "prolong-gct", "prolong-scaling", or "all".
std::vector<NamedIdentity> certified_zeros(const MetricContext& ctx, const std::string& target, unsigned jobs = 1);

struct OracleReport {
  std::string target;
  int dim = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::size_t identities = 0;
  std::size_t evaluations = 0;
  std::vector<std::string> failures;  // "<identity> @ seed <s>: <value>"
  [[nodiscard]] bool passed() const { return failures.empty() && identities > 0; }
};

// Seeds seed, seed+1, ..., seed+samples-1.
OracleReport run_oracle(const MetricContext& ctx, const std::string& target, int samples, std::uint64_t seed,
                        unsigned jobs = 1);
nlohmann::json to_json(const OracleReport& r);

}  // namespace einsym
