#include "einsym/var.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace einsym {
namespace {

constexpr int kPayloadBits = 60;

// Writes fixed-width fields from the most significant payload bit downwards,
// so that the numeric order of the packed word is the lexicographic order of
// the field sequence.
class Packer {
 public:
  explicit Packer(VarKind kind) : word_(static_cast<std::uint64_t>(kind) << kPayloadBits) {}
  void put(std::uint64_t value, int bits) {
    pos_ -= bits;
    word_ |= value << pos_;
  }
  [[nodiscard]] VarId done() const { return word_; }

 private:
  std::uint64_t word_;
  int pos_ = kPayloadBits;
};

class Unpacker {
 public:
  explicit Unpacker(VarId v) : word_(v) {}
  std::uint64_t get(int bits) {
    pos_ -= bits;
    return (word_ >> pos_) & ((std::uint64_t{1} << bits) - 1);
  }
  int index() { return static_cast<int>(get(5)); }

 private:
  std::uint64_t word_;
  int pos_ = kPayloadBits;
};

void check_index(int i) {
  if (i < 1 || i > kMaxIndex) {
    throw std::out_of_range("index " + std::to_string(i) + " outside [1.." +
                            std::to_string(kMaxIndex) + "]");
  }
}

const char* func_base(FuncKind k) {
  switch (k) {
    case FuncKind::H: return "H";
    case FuncKind::Phi: return "Phi";
    case FuncKind::PhiTilde: return "PhiT";
    case FuncKind::F: return "f";
    case FuncKind::A: return "A";
    case FuncKind::B: return "B";
  }
  return "?";
}

int func_arity(FuncKind k) {
  switch (k) {
    case FuncKind::H:
    case FuncKind::F: return 1;
    case FuncKind::A: return 0;
    default: return 2;
  }
}

void validate(const FuncAtom& a) {
  const int arity = func_arity(a.kind);
  if (arity >= 1) check_index(a.i);
  if (arity == 2) check_index(a.j);
  if (arity < 2 && a.j != 0) throw std::invalid_argument("function atom: unexpected index");
  if (arity < 1 && a.i != 0) throw std::invalid_argument("function atom: unexpected index");
  if (arity == 2 && a.i > a.j) throw std::invalid_argument("function atom: non-canonical pair");
  if (a.order() > a.max_order()) {
    throw DerivativeOrderError(std::string("derivative order cap exceeded for ") +
                               func_base(a.kind));
  }
  if (a.xs.size() > 3 || a.gs.size() > 2) {
    throw DerivativeOrderError("derivative slot capacity exceeded");
  }
  if (!a.gs.empty() && !a.metric_dependent()) {
    throw std::invalid_argument(std::string("function ") + func_base(a.kind) +
                                " does not depend on the metric");
  }
  for (int x : a.xs) check_index(x);
  for (auto [m, n] : a.gs) {
    check_index(m);
    check_index(n);
    if (m > n) throw std::invalid_argument("function atom: non-canonical metric pair");
  }
  if (!std::is_sorted(a.xs.begin(), a.xs.end()) || !std::is_sorted(a.gs.begin(), a.gs.end())) {
    throw std::invalid_argument("function atom: unsorted derivative list");
  }
}

// ---- parsing helpers ------------------------------------------------------

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}
  [[nodiscard]] bool done() const { return pos_ >= s_.size(); }
  [[nodiscard]] char peek() const { return done() ? '\0' : s_[pos_]; }
  bool eat(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view lit) {
    if (!eat(lit)) fail("expected '" + std::string(lit) + "'");
  }
  int integer() {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
    if (ec != std::errc() || ptr == s_.data() + pos_) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return value;
  }
  std::string identifier() {
    std::size_t start = pos_;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse variable '" + std::string(s_) + "': " + what);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::vector<int> int_list(Cursor& c) {
  std::vector<int> out{c.integer()};
  while (c.eat(",")) out.push_back(c.integer());
  return out;
}

IndexPair pair_in_brackets(Cursor& c) {
  c.expect("[");
  auto v = int_list(c);
  c.expect("]");
  if (v.size() != 2) c.fail("expected an index pair");
  return {v[0], v[1]};
}

VarId parse_func(Cursor& c, FuncKind kind, bool derived, int alias_order) {
  FuncAtom a;
  a.kind = kind;
  const int arity = func_arity(kind);
  if (!derived && arity == 0) return var::func(a);
  c.expect("[");
  if (arity >= 1) {
    if (c.peek() != ';') {
      auto v = int_list(c);
      if (static_cast<int>(v.size()) != arity) c.fail("wrong number of function indices");
      a.i = v[0];
      if (arity == 2) {
        auto p = canonical_pair(v[0], v[1]);
        a.i = p.first;
        a.j = p.second;
      }
    } else {
      c.fail("missing function index");
    }
  }
  if (derived) {
    c.expect(";");
    do {
      if (c.eat("x")) {
        a.xs.push_back(c.integer());
      } else if (c.eat("g")) {
        auto [m, n] = pair_in_brackets(c);
        a.gs.push_back(canonical_pair(m, n));
      } else {
        c.fail("expected x<k> or g[i,j] in derivative list");
      }
    } while (c.eat(","));
    std::sort(a.xs.begin(), a.xs.end());
    std::sort(a.gs.begin(), a.gs.end());
    if (a.order() == 0) c.fail("empty derivative list");
    if (alias_order > 0 && alias_order != a.order()) c.fail("alias order mismatch");
  }
  c.expect("]");
  return var::func(a);
}

}  // namespace

// ---- FuncAtom ---------------------------------------------------------------

FuncAtom FuncAtom::with_x(int a) const {
  FuncAtom out = *this;
  out.xs.insert(std::upper_bound(out.xs.begin(), out.xs.end(), a), a);
  if (out.order() > out.max_order() || out.xs.size() > 3) {
    throw DerivativeOrderError(std::string("derivative order cap exceeded for ") +
                               func_base(kind));
  }
  return out;
}

FuncAtom FuncAtom::with_g(int mu, int nu) const {
  if (!metric_dependent()) {
    throw std::invalid_argument(std::string("function ") + func_base(kind) +
                                " does not depend on the metric");
  }
  FuncAtom out = *this;
  auto p = canonical_pair(mu, nu);
  out.gs.insert(std::upper_bound(out.gs.begin(), out.gs.end(), p), p);
  if (out.order() > out.max_order() || out.gs.size() > 2) {
    throw DerivativeOrderError(std::string("derivative order cap exceeded for ") +
                               func_base(kind));
  }
  return out;
}

FuncAtom FuncAtom::underived() const {
  FuncAtom out = *this;
  out.xs.clear();
  out.gs.clear();
  return out;
}

// ---- constructors -----------------------------------------------------------

namespace var {

VarId lambda() { return Packer(VarKind::Lambda).done(); }

VarId param(std::string_view name, int i, int j) {
  if (name.empty() || name.size() > 6) throw std::invalid_argument("param name must be 1..6 chars");
  if (!std::isalpha(static_cast<unsigned char>(name[0]))) {
    throw std::invalid_argument("param name must start with a letter");
  }
  Packer p(VarKind::Param);
  for (std::size_t k = 0; k < 6; ++k) {
    unsigned char ch = k < name.size() ? static_cast<unsigned char>(name[k]) : 0;
    if (ch != 0 && !std::isalnum(ch) && ch != '_') throw std::invalid_argument("bad param name");
    p.put(ch, 7);
  }
  if (i != 0) check_index(i);
  if (j != 0) {
    check_index(j);
    if (i == 0) throw std::invalid_argument("param: second subscript without first");
  }
  p.put(static_cast<std::uint64_t>(i), 5);
  p.put(static_cast<std::uint64_t>(j), 5);
  return p.done();
}

VarId coord(int i) {
  check_index(i);
  Packer p(VarKind::Coord);
  p.put(static_cast<std::uint64_t>(i), 5);
  return p.done();
}

namespace {
VarId pair_var(VarKind kind, std::initializer_list<int> derivs, int mu, int nu) {
  for (int d : derivs) check_index(d);
  check_index(mu);
  check_index(nu);
  auto [a, b] = canonical_pair(mu, nu);
  Packer p(kind);
  for (int d : derivs) p.put(static_cast<std::uint64_t>(d), 5);
  p.put(static_cast<std::uint64_t>(a), 5);
  p.put(static_cast<std::uint64_t>(b), 5);
  return p.done();
}
}  // namespace

VarId metric(int mu, int nu) { return pair_var(VarKind::Metric, {}, mu, nu); }
VarId inv_metric(int mu, int nu) { return pair_var(VarKind::InvMetric, {}, mu, nu); }
VarId d1(int k, int mu, int nu) { return pair_var(VarKind::D1, {k}, mu, nu); }

VarId d2(int k, int l, int mu, int nu) {
  auto [a, b] = canonical_pair(k, l);
  return pair_var(VarKind::D2, {a, b}, mu, nu);
}

VarId d3(int k, int l, int e, int mu, int nu) {
  std::array<int, 3> s{k, l, e};
  std::sort(s.begin(), s.end());
  return pair_var(VarKind::D3, {s[0], s[1], s[2]}, mu, nu);
}

VarId func(const FuncAtom& a) {
  validate(a);
  Packer p(VarKind::Func);
  p.put(static_cast<std::uint64_t>(a.kind), 3);
  p.put(static_cast<std::uint64_t>(a.i), 5);
  p.put(static_cast<std::uint64_t>(a.j), 5);
  p.put(a.xs.size(), 2);
  for (std::size_t k = 0; k < 3; ++k) p.put(k < a.xs.size() ? a.xs[k] : 0, 5);
  p.put(a.gs.size(), 2);
  for (std::size_t k = 0; k < 2; ++k) {
    p.put(k < a.gs.size() ? a.gs[k].first : 0, 5);
    p.put(k < a.gs.size() ? a.gs[k].second : 0, 5);
  }
  return p.done();
}

VarId H(int eta) { return func(FuncAtom{FuncKind::H, eta, 0, {}, {}}); }
VarId Phi(int mu, int nu) {
  auto [a, b] = canonical_pair(mu, nu);
  return func(FuncAtom{FuncKind::Phi, a, b, {}, {}});
}
VarId PhiTilde(int mu, int nu) {
  auto [a, b] = canonical_pair(mu, nu);
  return func(FuncAtom{FuncKind::PhiTilde, a, b, {}, {}});
}
VarId f(int gamma) { return func(FuncAtom{FuncKind::F, gamma, 0, {}, {}}); }
VarId A() { return func(FuncAtom{FuncKind::A, 0, 0, {}, {}}); }
VarId B(int mu, int nu) {
  auto [a, b] = canonical_pair(mu, nu);
  return func(FuncAtom{FuncKind::B, a, b, {}, {}});
}

VarKind kind(VarId v) { return static_cast<VarKind>(v >> kPayloadBits); }

FuncAtom func_atom(VarId v) {
  if (kind(v) != VarKind::Func) throw std::invalid_argument("func_atom: not a function atom");
  Unpacker u(v);
  FuncAtom a;
  a.kind = static_cast<FuncKind>(u.get(3));
  a.i = u.index();
  a.j = u.index();
  const auto nx = u.get(2);
  for (std::size_t k = 0; k < 3; ++k) {
    int x = u.index();
    if (k < nx) a.xs.push_back(x);
  }
  const auto ng = u.get(2);
  for (std::size_t k = 0; k < 2; ++k) {
    int m = u.index();
    int n = u.index();
    if (k < ng) a.gs.emplace_back(m, n);
  }
  return a;
}

JetVar decode(VarId v) {
  JetVar j;
  j.kind = kind(v);
  Unpacker u(v);
  auto take = [&](int count) {
    for (int k = 0; k < count; ++k) j.idx[static_cast<std::size_t>(k)] = u.index();
  };
  switch (j.kind) {
    case VarKind::Lambda: break;
    case VarKind::Param: {
      for (int k = 0; k < 6; ++k) {
        auto ch = static_cast<char>(u.get(7));
        if (ch != 0) j.name.push_back(ch);
      }
      take(2);
      break;
    }
    case VarKind::Coord: take(1); break;
    case VarKind::Metric:
    case VarKind::InvMetric: take(2); break;
    case VarKind::D1: take(3); break;
    case VarKind::D2: take(4); break;
    case VarKind::D3: take(5); break;
    case VarKind::Func: j.func = func_atom(v); break;
  }
  return j;
}

int jet_order(VarId v) {
  switch (kind(v)) {
    case VarKind::Metric: return 0;
    case VarKind::D1: return 1;
    case VarKind::D2: return 2;
    case VarKind::D3: return 3;
    default: return -1;
  }
}

std::string name(VarId v) {
  const JetVar j = decode(v);
  std::ostringstream os;
  auto pair_str = [&](int a, int b) { os << '[' << a << ',' << b << ']'; };
  switch (j.kind) {
    case VarKind::Lambda: os << "lam"; break;
    case VarKind::Param:
      os << "p[" << j.name;
      if (j.idx[0] != 0) {
        os << ';' << j.idx[0];
        if (j.idx[1] != 0) os << ',' << j.idx[1];
      }
      os << ']';
      break;
    case VarKind::Coord: os << 'x' << j.idx[0]; break;
    case VarKind::Metric: os << 'g'; pair_str(j.idx[0], j.idx[1]); break;
    case VarKind::InvMetric: os << "gi"; pair_str(j.idx[0], j.idx[1]); break;
    case VarKind::D1: os << "d[" << j.idx[0] << "]g"; pair_str(j.idx[1], j.idx[2]); break;
    case VarKind::D2:
      os << "dd"; pair_str(j.idx[0], j.idx[1]); os << 'g'; pair_str(j.idx[2], j.idx[3]);
      break;
    case VarKind::D3:
      os << "ddd[" << j.idx[0] << ',' << j.idx[1] << ',' << j.idx[2] << "]g";
      pair_str(j.idx[3], j.idx[4]);
      break;
    case VarKind::Func: {
      const FuncAtom& a = j.func;
      const int arity = func_arity(a.kind);
      const bool derived = a.order() > 0;
      if (derived) os << 'd';
      os << func_base(a.kind);
      if (!derived && arity == 0) break;
      os << '[';
      if (arity >= 1) os << a.i;
      if (arity == 2) os << ',' << a.j;
      if (derived) {
        os << ';';
        bool first = true;
        for (int x : a.xs) {
          os << (first ? "" : ",") << 'x' << x;
          first = false;
        }
        for (auto [m, n] : a.gs) {
          os << (first ? "" : ",") << 'g';
          pair_str(m, n);
          first = false;
        }
      }
      os << ']';
      break;
    }
  }
  return os.str();
}

VarId parse_unchecked(std::string_view text) {
  Cursor c(text);
  VarId out = 0;
  auto finish = [&](VarId v) {
    if (!c.done()) c.fail("trailing characters");
    return v;
  };
  if (c.eat("lam")) {
    out = lambda();
    return finish(out);
  }
  if (c.eat("p[")) {
    std::string name = c.identifier();
    int i = 0;
    int j = 0;
    if (c.eat(";")) {
      auto v = int_list(c);
      if (v.size() > 2) c.fail("too many param subscripts");
      i = v[0];
      if (v.size() == 2) j = v[1];
    }
    c.expect("]");
    return finish(param(name, i, j));
  }
  if (c.eat("gi")) {
    auto [m, n] = pair_in_brackets(c);
    return finish(inv_metric(m, n));
  }
  if (c.eat("ddd[")) {
    auto d = int_list(c);
    c.expect("]g");
    if (d.size() != 3) c.fail("ddd needs three indices");
    auto [m, n] = pair_in_brackets(c);
    return finish(d3(d[0], d[1], d[2], m, n));
  }
  if (c.eat("dd[")) {
    auto d = int_list(c);
    c.expect("]g");
    if (d.size() != 2) c.fail("dd needs two indices");
    auto [m, n] = pair_in_brackets(c);
    return finish(d2(d[0], d[1], m, n));
  }
  if (c.eat("d[")) {
    auto d = int_list(c);
    c.expect("]g");
    if (d.size() != 1) c.fail("d needs one index");
    auto [m, n] = pair_in_brackets(c);
    return finish(d1(d[0], m, n));
  }
  if (c.peek() == 'g') {
    c.expect("g");
    auto [m, n] = pair_in_brackets(c);
    return finish(metric(m, n));
  }
  if (c.peek() == 'x') {
    c.expect("x");
    return finish(coord(c.integer()));
  }
  // Function atoms, derived (leading 'd') or aliased (<F><order>[...]).
  bool derived = false;
  std::string_view rest = text;
  if (!rest.empty() && rest[0] == 'd') {
    derived = true;
    c.expect("d");
  }
  static const std::pair<const char*, FuncKind> kBases[] = {
      {"PhiT", FuncKind::PhiTilde}, {"Phi", FuncKind::Phi}, {"H", FuncKind::H},
      {"f", FuncKind::F},           {"A", FuncKind::A},     {"B", FuncKind::B},
  };
  for (const auto& [base, kind] : kBases) {
    if (c.eat(base)) {
      int alias_order = 0;
      if (!derived && std::isdigit(static_cast<unsigned char>(c.peek()))) {
        alias_order = c.integer();
        if (alias_order < 1) c.fail("alias order must be positive");
        derived = true;
      }
      if (!derived && c.done()) {
        if (kind != FuncKind::A) c.fail("missing function indices");
        return var::A();
      }
      return finish(parse_func(c, kind, derived, alias_order));
    }
  }
  c.fail("unknown variable");
}

VarId parse(std::string_view text) {
  try {
    return parse_unchecked(text);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError("bad variable '" + std::string(text) + "': " + e.what());
  }
}

}  // namespace var
}  // namespace einsym
