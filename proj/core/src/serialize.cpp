#include "einsym/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <vector>

namespace einsym {

std::string Expr::str() const { return to_text(*this); }

std::string to_text(const Expr& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const Term& t : p.terms()) {
    if (!out.empty()) out += " + ";
    out += t.coeff.str();
    if (!t.mono.is_one()) {
      out += '*';
      out += t.mono.str();
    }
  }
  return out;
}

namespace {

std::uint32_t parse_exponent(std::string_view s) {
  std::uint32_t e = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), e);
  if (ec != std::errc() || ptr != s.data() + s.size() || e == 0) {
    throw ParseError("bad exponent '" + std::string(s) + "'");
  }
  return e;
}

Term parse_term(std::string_view text) {
  std::vector<std::string_view> pieces;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '*') {
      pieces.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (pieces.empty() || pieces[0].empty()) throw ParseError("empty term in '" + std::string(text) + "'");
  Rational coeff;
  try {
    coeff = Rational::parse(pieces[0]);
  } catch (const std::invalid_argument&) {
    throw ParseError("bad coefficient '" + std::string(pieces[0]) + "'");
  }
  std::vector<Factor> factors;
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    std::string_view piece = pieces[k];
    std::uint32_t e = 1;
    if (auto caret = piece.rfind('^'); caret != std::string_view::npos) {
      e = parse_exponent(piece.substr(caret + 1));
      piece = piece.substr(0, caret);
    }
    factors.push_back({var::parse(piece), e});
  }
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.var < b.var; });
  for (std::size_t k = 1; k < factors.size(); ++k) {
    if (factors[k].var == factors[k - 1].var) throw ParseError("repeated variable in term '" + std::string(text) + "'");
  }
  return {Monomial::from_factors(std::move(factors)), coeff};
}

}  // namespace

Expr parse_expr(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty expression");
  if (text == "0") return {};
  std::vector<Term> terms;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = text.find(" + ", start);
    terms.push_back(parse_term(text.substr(start, sep == std::string_view::npos ? std::string_view::npos : sep - start)));
    if (sep == std::string_view::npos) break;
    start = sep + 3;
  }
  return Expr::from_terms(std::move(terms));
}

nlohmann::json to_json(const Expr& p) {
  auto out = nlohmann::json::array();
  for (const Term& t : p.terms()) {
    auto mono = nlohmann::json::array();
    for (const Factor& f : t.mono.factors()) mono.push_back({var::name(f.var), f.exp});
    out.push_back({{"monomial", std::move(mono)}, {"coeff", t.coeff.str()}});
  }
  return out;
}

Expr expr_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("expression JSON must be an array");
  std::vector<Term> terms;
  for (const auto& item : j) {
    std::vector<Factor> factors;
    for (const auto& f : item.at("monomial")) {
      factors.push_back({var::parse(f.at(0).get<std::string>()), f.at(1).get<std::uint32_t>()});
    }
    std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.var < b.var; });
    terms.push_back({Monomial::from_factors(std::move(factors)), Rational::parse(item.at("coeff").get<std::string>())});
  }
  return Expr::from_terms(std::move(terms));
}

}  // namespace einsym
