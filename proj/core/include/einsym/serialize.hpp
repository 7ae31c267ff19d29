#pragma once

// Text and JSON forms of Expr.
//
// Text: terms leading-first, joined by " + ", each written as
// `coeff*var^e*...` (the coefficient is always present, `^e` only for e > 1).
// The zero polynomial is "0". Example: `-1/2*gi[1,1]*d[1]g[1,1] + 3`.
//
// JSON: [{"monomial": [["g[1,1]", 2], ...], "coeff": "p/q"}, ...] in the same
// term order.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "einsym/expr.hpp"

namespace einsym {

std::string to_text(const Expr& p);
Expr parse_expr(std::string_view text);

nlohmann::json to_json(const Expr& p);
Expr expr_from_json(const nlohmann::json& j);

}  // namespace einsym

#include <ostream>

namespace einsym {
inline std::ostream& operator<<(std::ostream& os, const Expr& p) { return os << to_text(p); }
}  // namespace einsym
