#include "einsym/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "einsym/determining.hpp"
#include "einsym/geometry.hpp"
#include "einsym/liealg.hpp"
#include "einsym/oracle.hpp"
#include "einsym/parallel.hpp"
#include "einsym/prolongation.hpp"
#include "einsym/serialize.hpp"

namespace einsym::cli {
namespace {

constexpr int kSymbolicCap = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  int dim = 2;
  std::string format = "text";
  std::string out;
  unsigned jobs = default_jobs();
};

struct Result {
  bool passed = true;
  nlohmann::json json;
  std::string text;
};

std::filesystem::path resolve(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("EINSYM_OUT_DIR"); dir != nullptr && *dir != '\0') p = std::filesystem::path(dir) / p;
  }
  return p;
}

// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << data;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void check_dim(int dim, int cap) {
  if (dim < 2) throw UsageError("--dim must be at least 2");
  if (dim > cap) throw UsageError("--dim " + std::to_string(dim) + " exceeds the cap of " + std::to_string(cap));
}

std::string report_text(const ProofReport& r) {
  std::ostringstream s;
  s << r.title << " (dim " << r.dim << ")\n";
  for (const ProofStep& st : r.steps) {
    s << (st.passed ? "PASS " : "FAIL ") << st.paper_eq << " " << st.name;
    if (!st.detail.empty()) s << " | " << st.detail;
    s << "\n";
  }
  s << (r.passed() ? "status: pass" : "status: fail") << "\n";
  return s.str();
}

Result from_report(const ProofReport& r) { return {r.passed(), to_json(r), report_text(r)}; }

IndexPair parse_component(const std::string& c, int dim) {
  int a = 0;
  int b = 0;
  char comma = 0;
  std::istringstream in(c);
  if (!(in >> a >> comma >> b) || comma != ',' || !in.eof() || a < 1 || b < 1 || a > dim || b > dim) {
    throw UsageError("bad --component '" + c + "', expected a,b within 1.." + std::to_string(dim));
  }
  return canonical_pair(a, b);
}

Result expr_listing(const std::string& what, int dim, const std::vector<std::pair<IndexPair, Expr>>& items) {
  Result r;
  nlohmann::json comps = nlohmann::json::array();
  std::ostringstream s;
  for (const auto& [ix, e] : items) {
    comps.push_back({{"index", {ix.first, ix.second}}, {"expr", to_text(e)}});
    s << what << "[" << ix.first << "," << ix.second << "] = " << to_text(e) << "\n";
  }
  r.json = {{"schema", 1}, {"dim", dim}, {"kind", what}, {"components", comps}};
  r.text = s.str();
  return r;
}

std::vector<IndexPair> components(const MetricContext& ctx, const std::string& component) {
  if (component.empty()) return ctx.pairs();
  return {parse_component(component, ctx.dim())};
}

Result cmd_ricci(const Config& cfg, const std::string& component) {
  check_dim(cfg.dim, kMaxIndex);
  const MetricContext ctx(cfg.dim);
  const auto comps = components(ctx, component);
  std::vector<std::pair<IndexPair, Expr>> items(comps.size());
  parallel_for(comps.size(), cfg.jobs, [&](std::size_t i) { items[i] = {comps[i], ricci(ctx, comps[i].first, comps[i].second)}; });
  return expr_listing("R", cfg.dim, items);
}

Result cmd_check_absent(const Config& cfg) {
  check_dim(cfg.dim, kSymbolicCap);
  const MetricContext ctx(cfg.dim);
  const AbsentReport rep = check_absent_derivatives(ctx, einstein_system(ctx, cfg.jobs));
  Result r;
  r.passed = rep.ok;
  nlohmann::json atoms = nlohmann::json::array();
  for (VarId v : rep.checked) atoms.push_back(var::name(v));
  r.json = {{"schema", 1}, {"dim", cfg.dim}, {"status", rep.ok ? "pass" : "fail"}, {"checked", atoms}};
  std::ostringstream s;
  s << "checked " << rep.checked.size() << " atoms\n";
  if (rep.offence) {
    const auto& o = *rep.offence;
    r.json["offence"] = {{"index", {o.alpha, o.beta}}, {"atom", var::name(o.atom)}};
    s << "FAIL " << var::name(o.atom) << " occurs in R[" << o.alpha << "," << o.beta << "]\n";
  }
  s << (rep.ok ? "status: pass" : "status: fail") << "\n";
  r.text = s.str();
  return r;
}

Result cmd_prolong(const Config& cfg, const std::string& field, const std::string& component, const std::string& route) {
  check_dim(cfg.dim, kSymbolicCap);
  const MetricContext ctx(cfg.dim);
  VectorField vf;
  if (field == "generic") {
    vf = generic_field(ctx);
  } else if (field == "gct") {
    vf = gct_generator(ctx);
  } else if (field == "scaling") {
    vf = scaling_generator(ctx);
  } else {
    vf = reduced_field(ctx);
  }
  const ProlongationTables tables(ctx, vf, route == "total" ? Route::Total : Route::Expanded, cfg.jobs);
  const auto comps = components(ctx, component);
  std::vector<std::pair<IndexPair, Expr>> items(comps.size());
  parallel_for(comps.size(), cfg.jobs, [&](std::size_t i) {
    items[i] = {comps[i], prolong_einstein_component(ctx, tables, comps[i].first, comps[i].second)};
  });
  Result r = expr_listing("prD", cfg.dim, items);
  r.json["field"] = field;
  r.json["route"] = route;
  return r;
}

Result cmd_determining(const Config& cfg, const std::string& cls) {
  check_dim(cfg.dim, kSymbolicCap);
  const MetricContext ctx(cfg.dim);
  DeterminingSystem sys;
  if (cls == "dgddg") {
    sys = extract_dg_ddg(ctx, cfg.jobs);
  } else if (cls == "ddg") {
    sys = extract_ddg(ctx, cfg.jobs);
  } else {
    sys = extract_dg(ctx, cfg.jobs);
  }
  Result r;
  nlohmann::json cs = nlohmann::json::array();
  std::ostringstream s;
  for (const Constraint& c : sys.constraints) {
    cs.push_back({{"class", class_name(c.cls)}, {"indices", c.indices}, {"source", c.source}, {"expr", to_text(c.expr)}});
    s << c.source << index_label(c.indices) << ": " << to_text(c.expr) << " = 0\n";
  }
  r.json = {{"schema", 1}, {"dim", cfg.dim}, {"class", cls}, {"count", sys.constraints.size()}, {"constraints", cs}};
  r.text = s.str();
  return r;
}

Result cmd_deduce(const Config& cfg, const std::string& step) {
  check_dim(cfg.dim, kSymbolicCap);
  const MetricContext ctx(cfg.dim);
  if (step == "h-indep") return from_report(deduce_h_independence(ctx, cfg.jobs));
  if (step == "phi-structure") return from_report(deduce_phi_structure(ctx, cfg.jobs));
  return from_report(deduce_dg(ctx, cfg.jobs));
}

Result cmd_verify(const Config& cfg, const std::string& what, const std::string& lambda) {
  if (what == "two-dim") {
    if (cfg.dim != 2) throw UsageError("verify two-dim requires --dim 2");
    return from_report(two_dim_branch(cfg.jobs));
  }
  check_dim(cfg.dim, kSymbolicCap);
  const MetricContext ctx(cfg.dim);
  if (what == "gct") {
    const GctSymmetryReport g = verify_gct_symmetry(ctx, cfg.jobs);
    Result r = from_report(g.report);
    r.json["signs"] = g.signs ? nlohmann::json{g.signs->first, g.signs->second} : nlohmann::json(nullptr);
    return r;
  }
  if (what == "scaling") return from_report(verify_scaling(ctx, lambda == "0", cfg.jobs));
  return from_report(ansatz_collapse(ctx, cfg.jobs));
}

Result cmd_certify(const Config& cfg, const std::string& lambda) {
  check_dim(cfg.dim, kSymbolicCap);
  const MetricContext ctx(cfg.dim);
  const Certificate cert = final_classification(ctx, lambda == "0" ? LambdaMode::Zero : LambdaMode::Symbolic, cfg.jobs);
  Result r;
  r.passed = cert.passed();
  r.json = to_json(cert);
  std::ostringstream s;
  s << report_text(cert.report);
  s << "generators:";
  for (const auto& g : cert.generators) s << " " << g;
  s << "\nvertical part: " << cert.phi_tilde << "\n";
  r.text = s.str();
  return r;
}

Result cmd_oracle(const Config& cfg, const std::string& target, int samples, std::uint64_t seed) {
  check_dim(cfg.dim, kSymbolicCap);
  if (samples < 1) throw UsageError("--samples must be positive");
  const OracleReport rep = run_oracle(MetricContext(cfg.dim), target, samples, seed, cfg.jobs);
  Result r;
  r.passed = rep.passed();
  r.json = to_json(rep);
  std::ostringstream s;
  s << "target " << rep.target << ", dim " << rep.dim << ": " << rep.identities << " identities x " << rep.samples
    << " points\n";
  for (const auto& f : rep.failures) s << "FAIL " << f << "\n";
  s << (rep.passed() ? "status: pass" : "status: fail") << "\n";
  r.text = s.str();
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic symmetry analysis of the vacuum Einstein equations", "einsym"};
  app.require_subcommand(1);
  Config cfg;
  auto common = [&cfg](CLI::App* sub, bool with_dim = true) {
    if (with_dim) sub->add_option("--dim", cfg.dim, "Spacetime dimension")->capture_default_str();
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    sub->add_option("--out", cfg.out, "Output file (relative to EINSYM_OUT_DIR when set)");
    sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  std::function<Result()> action;

  std::string component;
  auto* ricci_cmd = app.add_subcommand("ricci", "Print Ricci tensor components");
  common(ricci_cmd);
  ricci_cmd->add_option("--component", component, "Single component a,b");
  ricci_cmd->callback([&] { action = [&] { return cmd_ricci(cfg, component); }; });

  auto* absent_cmd = app.add_subcommand("check-absent", "Check the second-derivative atoms absent from R");
  common(absent_cmd);
  absent_cmd->callback([&] { action = [&] { return cmd_check_absent(cfg); }; });

  std::string field = "generic";
  std::string route = "expanded";
  auto* prolong_cmd = app.add_subcommand("prolong", "Second-prolongation action on R - lam g");
  common(prolong_cmd);
  prolong_cmd->add_option("--field", field)->check(CLI::IsMember({"generic", "gct", "scaling", "reduced"}))->capture_default_str();
  prolong_cmd->add_option("--route", route)->check(CLI::IsMember({"expanded", "total"}))->capture_default_str();
  prolong_cmd->add_option("--component", component, "Single component a,b");
  prolong_cmd->callback([&] { action = [&] { return cmd_prolong(cfg, field, component, route); }; });

  std::string cls = "dgddg";
  auto* det_cmd = app.add_subcommand("determining", "Extract a class of determining equations");
  common(det_cmd);
  det_cmd->add_option("--class", cls)->check(CLI::IsMember({"dgddg", "ddg", "dg"}))->capture_default_str();
  det_cmd->callback([&] { action = [&] { return cmd_determining(cfg, cls); }; });

  std::string step;
  auto* deduce_cmd = app.add_subcommand("deduce", "Run one deduction");
  common(deduce_cmd);
  deduce_cmd->add_option("--step", step)->required()->check(CLI::IsMember({"h-indep", "phi-structure", "dg"}));
  deduce_cmd->callback([&] { action = [&] { return cmd_deduce(cfg, step); }; });

  std::string lambda = "sym";
  auto* verify_cmd = app.add_subcommand("verify", "Verify a symmetry statement");
  verify_cmd->require_subcommand(1);
  for (const char* what : {"gct", "scaling", "ansatz", "two-dim"}) {
    auto* sub = verify_cmd->add_subcommand(what);
    common(sub);
    if (std::string(what) == "scaling") {
      sub->add_option("--lambda", lambda)->check(CLI::IsMember({"sym", "0"}))->capture_default_str();
    }
    sub->callback([&, w = std::string(what)] { action = [&, w] { return cmd_verify(cfg, w, lambda); }; });
  }

  auto* cert_cmd = app.add_subcommand("certify", "Emit the classification certificate");
  common(cert_cmd);
  cert_cmd->add_option("--lambda", lambda)->check(CLI::IsMember({"sym", "0"}))->capture_default_str();
  cert_cmd->callback([&] {
    if (cfg.format == "text" && !cert_cmd->count("--format")) cfg.format = "json";
    action = [&] { return cmd_certify(cfg, lambda); };
  });

  std::string target = "ricci";
  int samples = 100;
  std::uint64_t seed = 1;
  auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate certified identities at random rational points");
  common(oracle_cmd);
  oracle_cmd->add_option("--target", target)
      ->check(CLI::IsMember({"ricci", "prolong-gct", "prolong-scaling", "dricci", "all"}))
      ->capture_default_str();
  oracle_cmd->add_option("--samples", samples)->capture_default_str();
  oracle_cmd->add_option("--seed", seed)->capture_default_str();
  oracle_cmd->callback([&] { action = [&] { return cmd_oracle(cfg, target, samples, seed); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (!action) {
    err << "error: no command\n";
    return kUsage;
  }
  try {
    const Result r = action();
    const std::string data = cfg.format == "json" ? r.json.dump(2) + "\n" : r.text;
    if (cfg.out.empty()) {
      out << data;
    } else {
      write_atomic(resolve(cfg.out), data);
    }
    if (!r.passed) {
      err << "check failed\n";
      return kCheckFailed;
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace einsym::cli
