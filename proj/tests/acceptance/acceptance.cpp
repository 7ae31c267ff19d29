// Runs acceptance criteria 1-7 and prints one PASS/FAIL line per criterion.
// Usage: einsym_acceptance [criterion...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "einsym/cli.hpp"
#include "einsym/determining.hpp"
#include "einsym/geometry.hpp"
#include "einsym/liealg.hpp"
#include "einsym/oracle.hpp"
#include "einsym/parallel.hpp"
#include "einsym/prolongation.hpp"
#include "einsym/serialize.hpp"

using namespace einsym;

namespace {

const unsigned kJobs = default_jobs();

// Collects failures for one criterion; the first few are kept for the report.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    if (failed_.size() < 5) failed_.push_back(what);
    ++failures_;
  }
  void report(const ProofReport& rep, const std::string& what) {
    expect(rep.passed(), what + failing_step(rep));
  }
  void labels(const ProofReport& rep, const std::vector<std::string>& wanted, const std::string& what) {
    for (const std::string& l : wanted) {
      bool found = false;
      for (const ProofStep& s : rep.steps) found = found || (s.paper_eq == l && s.passed);
      expect(found, what + " has no passing step " + l);
    }
  }
  [[nodiscard]] bool ok() const { return failures_ == 0 && total_ > 0; }
  [[nodiscard]] std::string summary() const {
    std::string s = std::to_string(total_ - failures_) + "/" + std::to_string(total_) + " checks";
    for (const std::string& f : failed_) s += "; " + f;
    return s;
  }

 private:
  static std::string failing_step(const ProofReport& rep) {
    for (const ProofStep& s : rep.steps) {
      if (!s.passed) return " (step " + s.name + " " + s.paper_eq + ")";
    }
    return {};
  }
  std::size_t total_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> failed_;
};

std::string dims(int n) { return "N=" + std::to_string(n); }

Checks geometry_kernel() {
  Checks c;
  for (int n = 2; n <= 4; ++n) {
    const MetricContext ctx(n);
    bool christoffel_ok = true;
    for (int t = 1; t <= n; ++t) {
      for (int g = 1; g <= n; ++g) {
        for (int a = 1; a <= n; ++a) {
          christoffel_ok = christoffel_ok &&
                           christoffel(ctx, t, g, a) + christoffel(ctx, g, t, a) == Expr::variable(var::d1(a, t, g));
        }
      }
    }
    c.expect(christoffel_ok, "Christoffel sum identity " + dims(n));

    // A_(mn) X_{gd}^{mn} = A_gd with A built from independent atoms.
    SymmetricArray<Expr> amat(n);
    for (auto [m, k] : ctx.pairs()) amat.at(m, k) = Expr::variable(var::param("A", m, k));
    bool collapse_ok = true;
    for (int g = 1; g <= n; ++g) {
      for (int d = 1; d <= n; ++d) {
        Expr sum;
        for (auto [m, k] : ctx.pairs()) sum += amat.at(m, k) * x_symbol_mixed(ctx, g, d, m, k);
        collapse_ok = collapse_ok && sum == amat.at(g, d);
      }
    }
    c.expect(collapse_ok, "X contraction collapse " + dims(n));

    const AbsentReport absent = check_absent_derivatives(ctx, einstein_system(ctx, kJobs));
    c.expect(absent.ok, "absent derivatives " + dims(n));
    c.expect(absent.checked.size() == static_cast<std::size_t>(2 * n * (n - 1)), "absent atom count " + dims(n));
  }
  return c;
}

Checks ricci_partials() {
  Checks c;
  for (int n = 2; n <= 3; ++n) {
    const MetricContext ctx(n);
    const EinsteinSystem sys = einstein_system(ctx, kJobs);
    std::size_t mismatches = 0;
    for (auto [a, b] : ctx.pairs()) {
      const Expr& r = sys.ricci.at(a, b);
      for (VarId v : enumerate_vars(ctx, 2)) {
        const JetVar j = var::decode(v);
        mismatches += dricci_d2(ctx, a, b, j.idx[0], j.idx[1], j.idx[2], j.idx[3]) != formal_diff(r, v);
      }
      for (VarId v : enumerate_vars(ctx, 1)) {
        const JetVar j = var::decode(v);
        mismatches += dricci_d1(ctx, a, b, j.idx[0], j.idx[1], j.idx[2]) != formal_diff(r, v);
      }
      for (auto [m, k] : ctx.pairs()) mismatches += dricci_d0(ctx, a, b, m, k) != metric_chain_diff(ctx, r, m, k);
    }
    c.expect(mismatches == 0, "symbolic partials " + dims(n) + ": " + std::to_string(mismatches) + " mismatches");
    const OracleReport rep = run_oracle(ctx, "dricci", 100, 1, kJobs);
    c.expect(rep.passed(), "numeric partials " + dims(n) + ": " + std::to_string(rep.failures.size()) + " failures");
  }
  return c;
}

Checks prolongation_consistency() {
  Checks c;
  for (int n = 2; n <= 3; ++n) {
    const MetricContext ctx(n);
    const VectorField vf = generic_field(ctx);
    const ProlongationTables expanded(ctx, vf, Route::Expanded, kJobs);
    const ProlongationTables total(ctx, vf, Route::Total, kJobs);
    bool tables_ok = true;
    for (auto [t, g] : ctx.pairs()) {
      for (int a = 1; a <= n; ++a) tables_ok = tables_ok && expanded.first(t, g, a) == total.first(t, g, a);
      for (auto [a, b] : ctx.pairs()) {
        const Expr& e = expanded.second(t, g, a, b);
        tables_ok = tables_ok && e == total.second(t, g, a, b) && !e.contains_if([](VarId v) { return var::kind(v) == VarKind::D3; });
      }
    }
    c.expect(tables_ok, "expanded and total coefficients agree " + dims(n));
    const ProlongedAction assembled = prolong_einstein(ctx, expanded, kJobs);
    const auto& pairs = ctx.pairs();
    std::vector<bool> same(pairs.size());
    parallel_for(pairs.size(), kJobs, [&](std::size_t i) {
      const auto [a, b] = pairs[i];
      same[i] = prolong_direct(ctx, total, einstein_delta(ctx, a, b)) == assembled.at(a, b);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      c.expect(same[i], "direct vs assembled action " + dims(n) + " component " +
                            index_label({pairs[i].first, pairs[i].second}));
    }
  }
  return c;
}

Checks determining_equations() {
  Checks c;
  for (int n = 2; n <= 3; ++n) {
    const MetricContext ctx(n);
    const DeterminingSystem mixed = extract_dg_ddg(ctx, kJobs);
    bool mixed_ok = !mixed.constraints.empty();
    for (const Constraint& k : mixed.constraints) {
      const auto& i = k.indices;
      mixed_ok = mixed_ok && Expr(2L) * k.expr == dg_ddg_formula(ctx, i[0], i[1], i[2], i[3], i[4], i[5], i[6]);
    }
    c.expect(mixed_ok, "mixed-class extraction " + dims(n));

    const ProofReport h = deduce_h_independence(ctx, kJobs);
    c.report(h, "H independence " + dims(n));
    c.labels(h, n == 2 ? std::vector<std::string>{"(33)", "(35)", "(32)"} : std::vector<std::string>{"(32)"},
             "H independence " + dims(n));

    const DeterminingSystem ddg = extract_ddg(ctx, kJobs);
    // Coefficients are a fixed rational multiple of the closed form; the
    // multiple may differ on d_s d_s g_ss.
    std::map<std::pair<std::string, bool>, std::optional<Rational>> ratio;
    bool ddg_ok = !ddg.constraints.empty();
    for (const Constraint& k : ddg.constraints) {
      const auto& i = k.indices;
      const bool diag = k.source == "(37)";
      const Expr f = diag ? ddg_diag_formula(ctx, i[0], i[1], i[2], i[3]) : ddg_offdiag_formula(ctx, i[0], i[1], i[2], i[3]);
      if (f.is_zero() || k.expr.is_zero()) {
        ddg_ok = ddg_ok && f.is_zero() && k.expr.is_zero();
        continue;
      }
      auto& r = ratio[{k.source, diag && i[2] == i[3]}];
      if (!r) r = k.expr.terms().front().coeff / f.terms().front().coeff;
      ddg_ok = ddg_ok && k.expr == *r * f;
    }
    c.expect(ddg_ok && ratio.size() >= 2, "second-derivative extraction " + dims(n));

    c.report(verify_sufficiency(ctx, Sufficiency::DgDdg, kJobs), "mixed-class sufficiency " + dims(n));
    c.report(verify_sufficiency(ctx, Sufficiency::DdgDiag, kJobs), "diagonal case analysis " + dims(n));
    c.report(verify_sufficiency(ctx, Sufficiency::DdgOffdiag, kJobs), "off-diagonal case analysis " + dims(n));

    const ProofReport phi = deduce_phi_structure(ctx, kJobs);
    c.report(phi, "PhiT structure " + dims(n));
    std::vector<std::string> wanted{"(38)", "(40)", "(44)", "(47)", "(48)", "(49)", "(50)"};
    if (n >= 3) {
      for (const char* l : {"(43)", "(45)", "(51)"}) wanted.emplace_back(l);
    }
    c.labels(phi, wanted, "PhiT structure " + dims(n));
  }
  return c;
}

Checks symmetry_certificates() {
  Checks c;
  const MetricContext two(2);
  const MetricContext three(3);
  const GctSymmetryReport gct2 = verify_gct_symmetry(two, kJobs);
  c.report(gct2.report, "GCT N=2");
  c.expect(gct2.signs.has_value(), "GCT N=2 vanishing combination");
  const GctSymmetryReport gct3 = verify_gct_symmetry(three, kJobs, {{1, 1}, {1, 2}, {2, 3}});
  c.report(gct3.report, "GCT N=3 spot");
  c.expect(gct3.signs == gct2.signs, "GCT combination independent of N");
  for (const MetricContext* ctx : {&two, &three}) {
    c.report(verify_scaling(*ctx, false, kJobs), "scaling, lambda symbolic " + dims(ctx->dim()));
    c.report(verify_scaling(*ctx, true, kJobs), "scaling, lambda = 0 " + dims(ctx->dim()));
  }
  const ProofReport ansatz = ansatz_collapse(three, kJobs);
  c.report(ansatz, "ansatz collapse N=3");
  c.labels(ansatz, {"(70)", "(74)", "(76)", "(77)"}, "ansatz collapse N=3");
  const ProofReport branch = two_dim_branch(kJobs);
  c.report(branch, "two-dimensional branch");
  c.labels(branch, {"(78)", "(79)", "(80)", "(81)", "(82)", "(83)"}, "two-dimensional branch");
  for (const MetricContext* ctx : {&two, &three}) {
    const Certificate sym = final_classification(*ctx, LambdaMode::Symbolic, kJobs);
    const Certificate zero = final_classification(*ctx, LambdaMode::Zero, kJobs);
    c.expect(sym.passed() && sym.generators == std::vector<std::string>{"GCT"} && sym.phi_tilde == "0",
             "certificate, lambda symbolic " + dims(ctx->dim()));
    c.expect(zero.passed() && zero.generators == std::vector<std::string>{"GCT", "scaling"} &&
                 zero.phi_tilde == "p[A]*g[mu,nu]",
             "certificate, lambda = 0 " + dims(ctx->dim()));
  }
  return c;
}

Checks oracle_cross_check() {
  Checks c;
  for (int n = 2; n <= 3; ++n) {
    const OracleReport rep = run_oracle(MetricContext(n), "all", 100, 1, kJobs);
    std::string detail = "oracle " + dims(n) + ": " + std::to_string(rep.identities) + " identities, " +
                         std::to_string(rep.failures.size()) + " failures";
    if (!rep.failures.empty()) detail += " (" + rep.failures.front() + ")";
    c.expect(rep.passed() && rep.samples == 100, detail);
  }
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Checks determinism() {
  Checks c;
  const auto dir = std::filesystem::temp_directory_path() / ("einsym_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  for (const char* lambda : {"sym", "0"}) {
    std::vector<std::string> names;
    for (const char* jobs : {"1", "4"}) {
      const std::string out = (dir / (std::string("cert_") + lambda + "_" + jobs + ".json")).string();
      std::ostringstream sink;
      const int code = cli::run({"certify", "--dim", "3", "--lambda", lambda, "--jobs", jobs, "--out", out}, sink, sink);
      c.expect(code == 0, std::string("certify --lambda ") + lambda + " --jobs " + jobs + " exit " + std::to_string(code));
      names.push_back(out);
    }
    const std::string first = slurp(names[0]);
    c.expect(!first.empty() && first == slurp(names[1]), std::string("byte-identical certify --lambda ") + lambda);
  }
  std::filesystem::remove_all(dir);
  return c;
}

struct Criterion {
  int id;
  std::string name;
  double target_seconds;  // 0 when there is no runtime target
  std::function<Checks()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "geometry kernel", 5, geometry_kernel},
      {2, "Ricci partials", 60, ricci_partials},
      {3, "prolongation consistency", 600, prolongation_consistency},
      {4, "determining equations", 0, determining_equations},
      {5, "symmetry certificates", 0, symmetry_certificates},
      {6, "oracle cross-check", 0, oracle_cross_check},
      {7, "determinism", 0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& crit : criteria) {
    if (!selected.empty() && !selected.contains(crit.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Checks checks;
    std::string error;
    try {
      checks = crit.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = crit.target_seconds == 0 || secs < crit.target_seconds;
    const bool ok = error.empty() && checks.ok() && in_time;
    failed += ok ? 0 : 1;
    char timing[64];
    if (crit.target_seconds > 0) {
      std::snprintf(timing, sizeof timing, "%.1fs, target < %.0fs", secs, crit.target_seconds);
    } else {
      std::snprintf(timing, sizeof timing, "%.1fs", secs);
    }
    std::cout << "criterion " << crit.id << ": " << (ok ? "PASS" : "FAIL") << "  " << crit.name << " (" << timing
              << ") " << (error.empty() ? checks.summary() : "exception: " + error) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
