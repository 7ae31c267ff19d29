#pragma once

// Atomic variables of the jet space.
//
// Every atom is packed into a single 64-bit VarId whose numeric order is the
// global variable order used by the monomial ordering. The encoding is a pure
// function of the canonical atom, so no registry or interning table is needed
// and VarIds are stable across runs and threads.
//
// Text grammar (1-based indices, bit-exact round trip with var::parse):
//
//   lam                      cosmological parameter
//   p[NAME]  p[NAME;i,j]     named constant (optionally indexed)
//   x3                       coordinate x^3
//   g[1,2]  gi[1,2]          metric / inverse-metric component
//   d[3]g[1,2]               first partial    d_3 g_12
//   dd[1,3]g[2,2]            second partial   d_1 d_3 g_22
//   ddd[1,2,3]g[1,1]         third partial (transient only)
//   H[2]  Phi[1,2]  PhiT[1,2]  f[1]  A  B[1,2]          generator functions
//   dH[2;x1]  dPhi[1,2;g[1,1]]  df[1;x1,x2,x2]  dA[;x1] derivative atoms
//
// Derivative lists hold the x-derivatives (sorted) followed by the metric
// derivatives (sorted canonical pairs). The parser also accepts the alias
// `<F><k>[...]` for a derivative atom of order k, e.g. f3[1;x1,x2,x2].

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace einsym {

using VarId = std::uint64_t;

enum class VarKind : std::uint8_t {
  Lambda = 0,
  Param = 1,
  Coord = 2,
  Metric = 3,
  InvMetric = 4,
  D1 = 5,
  D2 = 6,
  D3 = 7,
  Func = 8,
};

enum class FuncKind : std::uint8_t { H = 0, Phi = 1, PhiTilde = 2, F = 3, A = 4, B = 5 };

inline constexpr int kMaxIndex = 31;

class DerivativeOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using IndexPair = std::pair<int, int>;

inline IndexPair canonical_pair(int a, int b) { return a <= b ? IndexPair{a, b} : IndexPair{b, a}; }

// An unknown generator function together with the derivatives applied to it.
struct FuncAtom {
  FuncKind kind = FuncKind::H;
  int i = 0;  // first function index (0 if unused)
  int j = 0;  // second function index (0 if unused)
  std::vector<int> xs;        // sorted x-derivative indices
  std::vector<IndexPair> gs;  // sorted metric-derivative pairs

  [[nodiscard]] int order() const { return static_cast<int>(xs.size() + gs.size()); }
  // Highest total derivative order an atom of this kind may carry.
  [[nodiscard]] int max_order() const { return kind == FuncKind::F ? 3 : 2; }
  // Whether the function may depend on the metric at all.
  [[nodiscard]] bool metric_dependent() const {
    return kind == FuncKind::H || kind == FuncKind::Phi || kind == FuncKind::PhiTilde;
  }

  // Throws DerivativeOrderError when the cap would be exceeded.
  [[nodiscard]] FuncAtom with_x(int a) const;
  [[nodiscard]] FuncAtom with_g(int mu, int nu) const;
  [[nodiscard]] FuncAtom underived() const;

  friend bool operator==(const FuncAtom&, const FuncAtom&) = default;
};

struct JetVar {
  VarKind kind = VarKind::Lambda;
  // Metric/InvMetric: mu,nu.  D1: k,mu,nu.  D2: k,l,mu,nu.  D3: k,l,e,mu,nu.
  // Coord: i.  Param: i,j (optional subscripts).
  std::array<int, 5> idx{};
  std::string name;  // Param only
  FuncAtom func;     // Func only
};

namespace var {

VarId lambda();
VarId param(std::string_view name, int i = 0, int j = 0);
VarId coord(int i);
VarId metric(int mu, int nu);
VarId inv_metric(int mu, int nu);
VarId d1(int k, int mu, int nu);
VarId d2(int k, int l, int mu, int nu);
VarId d3(int k, int l, int e, int mu, int nu);
VarId func(const FuncAtom& atom);

// Underived generator atoms.
VarId H(int eta);
VarId Phi(int mu, int nu);
VarId PhiTilde(int mu, int nu);
VarId f(int gamma);
VarId A();
VarId B(int mu, int nu);

VarKind kind(VarId v);
JetVar decode(VarId v);
FuncAtom func_atom(VarId v);  // requires kind(v) == Func

// Order of a metric partial atom: 0 for g, 1..3 for D1..D3, -1 otherwise.
int jet_order(VarId v);

std::string name(VarId v);
VarId parse(std::string_view text);

}  // namespace var
}  // namespace einsym
