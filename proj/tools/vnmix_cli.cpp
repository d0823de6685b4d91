// vnmix: command-line front end.
//
// Exit codes: 0 yes/success, 1 no, 2 indeterminate, 3 error,
// 4 oracle disagreement.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vnmix/acceptance.hpp"
#include "vnmix/exact_channel.hpp"
#include "vnmix/io.hpp"
#include "vnmix/oracle.hpp"
#include "vnmix/reachability.hpp"

namespace {

using namespace vnmix;
using io::ordered_json;

constexpr int kExitError = 3;
constexpr int kExitDisagreement = 4;

struct RunConfig {
  std::string omega, rho, algebra, report, channel, out;
  std::string mode = "auto";
  std::string to = "choi";
  std::string ideal;
  double tol_eig = Tolerances{}.eig;
  double tol_feas = Tolerances{}.feas;
  double tol_dec = Tolerances{}.dec;
  std::uint64_t seed = 0;
  bool with_oracle = false;
  std::vector<int> suites;

  Tolerances tolerances() const {
    for (double t : {tol_eig, tol_feas, tol_dec})
      if (!(t > 0.0 && t < 1.0)) throw Error("tolerances must lie in (0, 1)");
    Tolerances t;
    t.eig = tol_eig;
    t.feas = tol_feas;
    t.dec = tol_dec;
    return t;
  }
};

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::yes: return 0;
    case Verdict::no: return 1;
    default: return 2;
  }
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json tolerances_json(const Tolerances& t) {
  ordered_json j;
  j["eig"] = t.eig;
  j["feas"] = t.feas;
  j["dec"] = t.dec;
  return j;
}

void merge_into(ordered_json& target, const ordered_json& fields) {
  for (const auto& [k, v] : fields.items()) target[k] = v;
}

void emit(const RunConfig& cfg, ordered_json report) {
  report["timestamp"] = timestamp();
  const auto text = io::dump(report);
  if (cfg.out.empty())
    std::cout << text;
  else
    io::write_file_atomic(cfg.out, text);
}

Functional load(const std::string& file, const std::string& flag, const RunConfig& cfg) {
  if (file.empty()) throw Error("missing " + flag);
  auto f = io::read_functional(file);
  if (!cfg.algebra.empty()) {
    const auto j = io::read_json_file(cfg.algebra);
    const auto a = io::algebra_from_json(j, "");
    if (!(a == f.algebra()))
      throw Error(file + ": algebra " + f.algebra().to_string() + " does not match --algebra " + a.to_string());
  }
  return f;
}

std::string resolve_mode(const std::string& mode, const Functional& w, const Functional& r, const Tolerances& tol) {
  if (mode != "auto") {
    if (mode != "state" && mode != "positive" && mode != "hermitian" && mode != "general")
      throw Error("unknown --mode " + mode);
    return mode;
  }
  if (w.is_state(tol.eig) && r.is_state(tol.eig)) return "state";
  if (w.is_positive(tol.eig) && r.is_positive(tol.eig)) return "positive";
  return "hermitian";
}

Decision decide(const std::string& mode, const Functional& w, const Functional& r, const Tolerances& tol) {
  if (mode == "state") return check_state_reachable(w, r, tol);
  if (mode == "positive") return check_more_mixed(w, r, tol);
  if (mode == "general") return check_hermitian_reachable_general(w, r, tol).decision;
  return check_hermitian_reachable(w, r, tol);
}

ordered_json oracle_json(const oracle::OracleReport& o, Verdict expected) {
  ordered_json j;
  j["status"] = numerics::to_string(o.status);
  j["verdict"] = to_string(o.verdict());
  j["residual"] = o.residual;
  j["iterations"] = o.iterations;
  j["agrees"] = o.verdict() == expected;
  j["detail"] = o.detail;
  return j;
}

bool oracle_applicable(const AlgebraSpec& a) {
  try {
    oracle::check_caps(a);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// the oracle only counts as disagreeing when both sides are decided
bool disagrees(Verdict decided, Verdict oracle) {
  return decided != Verdict::indeterminate && oracle != Verdict::indeterminate && decided != oracle;
}

int cmd_reach(const RunConfig& cfg) {
  const auto tol = cfg.tolerances();
  const auto w = load(cfg.omega, "--omega", cfg);
  const auto r = load(cfg.rho, "--rho", cfg);
  require_same(w.algebra(), r.algebra());
  const auto mode = resolve_mode(cfg.mode, w, r, tol);
  const auto d = decide(mode, w, r, tol);

  ordered_json rep;
  rep["command"] = "reach";
  rep["mode"] = mode;
  merge_into(rep, io::to_json(d));
  rep["inputs"] = {{"omega", io::to_json(w)}, {"rho", io::to_json(r)}};
  rep["tolerances"] = tolerances_json(tol);
  rep["seed"] = cfg.seed;
  int code = exit_code(d.verdict);
  if (cfg.with_oracle) {
    if (!oracle_applicable(w.algebra())) throw Error("--with-oracle: algebra exceeds oracle caps (3 blocks, dim 4)");
    const auto o = oracle::choi_membership_oracle(w, r, mode != "state", tol);
    rep["oracle"] = oracle_json(o, d.verdict);
    if (disagrees(d.verdict, o.verdict())) code = kExitDisagreement;
  }
  std::cerr << "verdict: " << to_string(d.verdict) << " (margin " << d.margin << ")\n" << d.explanation << "\n";
  emit(cfg, rep);
  return code;
}

ordered_json residuals_json(const KrausMap& k, const Functional& w, const Functional& r) {
  ordered_json j;
  j["unitality"] = k.unitality_residual();
  j["composition"] = composition_residual(k, w, r);
  return j;
}

int cmd_transport(const RunConfig& cfg) {
  const auto tol = cfg.tolerances();
  const auto w = load(cfg.omega, "--omega", cfg);
  const auto r = load(cfg.rho, "--rho", cfg);
  require_same(w.algebra(), r.algebra());
  const auto d = check_hermitian_reachable(w, r, tol);
  if (d.verdict != Verdict::yes) {
    ordered_json rep;
    rep["command"] = "transport";
    rep["mode"] = "hermitian";
    merge_into(rep, io::to_json(d));
    rep["inputs"] = {{"omega", io::to_json(w)}, {"rho", io::to_json(r)}};
    rep["tolerances"] = tolerances_json(tol);
    rep["seed"] = cfg.seed;
    std::cerr << "transport condition fails: " << d.explanation << "\n";
    emit(cfg, rep);
    return exit_code(d.verdict);
  }
  const auto t = build_transport_map(w, r, tol);
  ordered_json out = io::to_json(t.kraus);
  ordered_json ver = residuals_json(t.kraus, w, r);
  ver["choi_min_eigenvalue"] = t.choi.min_eigenvalue();
  ver["scalings"] = {{"c_plus", io::to_json(t.scalings.c_plus)},
                     {"c_minus", io::to_json(t.scalings.c_minus)},
                     {"p_plus_central", io::to_json(t.scalings.p_plus_central)},
                     {"p_minus_central", io::to_json(t.scalings.p_minus_central)}};
  out["verification"] = ver;
  std::cerr << "transport map with " << t.kraus.size() << " Kraus operators, unitality residual "
            << t.kraus.unitality_residual() << "\n";
  emit(cfg, out);
  return 0;
}

int cmd_exact(const RunConfig& cfg) {
  const auto tol = cfg.tolerances();
  const auto w = load(cfg.omega, "--omega", cfg);
  const auto r = load(cfg.rho, "--rho", cfg);
  require_same(w.algebra(), r.algebra());
  const auto ext = extension_feasible(w, r, tol);
  if (ext.status != numerics::Feasibility::feasible) {
    ordered_json rep;
    rep["command"] = "exact-channel";
    rep["status"] = numerics::to_string(ext.status);
    rep["explanation"] = ext.explanation;
    rep["inputs"] = {{"omega", io::to_json(w)}, {"rho", io::to_json(r)}};
    rep["tolerances"] = tolerances_json(tol);
    std::cerr << "no exact channel: " << ext.explanation << "\n";
    emit(cfg, rep);
    return ext.status == numerics::Feasibility::infeasible ? 1 : 2;
  }
  const auto ch = construct_exact_channel(w, r, ext, tol);
  ordered_json out = io::to_json(ch.channel);
  ordered_json ver;
  ver["unitality"] = ch.unitality_residual;
  ver["composition"] = ch.composition_residual;
  ver["raw_unitality"] = ch.raw_unitality_residual;
  ver["isometry"] = ch.isometry_residual;
  ver["cyclic"] = ch.cyclic_residual;
  ver["intertwining"] = ch.intertwining_residual;
  ver["multiplicity"] = ch.multiplicity;
  ver["extension_algebra_residual"] = ext.certificate->algebra_residual;
  ver["extension_commutant_residual"] = ext.certificate->commutant_residual;
  out["verification"] = ver;
  std::cerr << "exact channel with " << ch.channel.size() << " Kraus operators; unitality " << ch.unitality_residual
            << ", composition " << ch.composition_residual << "\n";
  emit(cfg, out);
  return 0;
}

int cmd_jordan(const RunConfig& cfg) {
  const auto tol = cfg.tolerances();
  const auto w = load(cfg.omega, "--omega", cfg);
  const auto jp = jordan_decompose(w, tol);
  ordered_json out;
  out["command"] = "jordan";
  out["norm"] = w.norm();
  out["positive_mass"] = jp.positive_part.total_mass();
  out["negative_mass"] = jp.negative_part.total_mass();
  out["positive_part"] = io::to_json(jp.positive_part);
  out["negative_part"] = io::to_json(jp.negative_part);
  std::cerr << "||omega|| = " << w.norm() << " = " << jp.positive_part.total_mass() << " + "
            << jp.negative_part.total_mass() << "\n";
  emit(cfg, out);
  return 0;
}

int cmd_ideal_norms(const RunConfig& cfg) {
  const auto w = load(cfg.omega, "--omega", cfg);
  std::optional<Functional> r;
  if (!cfg.rho.empty()) {
    r = load(cfg.rho, "--rho", cfg);
    require_same(w.algebra(), r->algebra());
  }
  const auto lattice = enumerate_ideals(w.algebra());
  ordered_json rows = ordered_json::array();
  std::ostringstream table;
  table << "ideal\tomega" << (r ? "\trho" : "") << "\n";
  for (const auto& j : lattice.ideals) {
    ordered_json row;
    ordered_json blocks = ordered_json::array();
    for (auto b : j.blocks()) blocks.push_back(b + 1);
    row["ideal"] = blocks;
    row["omega"] = ideal_norm(w, j);
    table << j.to_string() << "\t" << ideal_norm(w, j);
    if (r) {
      row["rho"] = ideal_norm(*r, j);
      table << "\t" << ideal_norm(*r, j);
    }
    table << "\n";
    rows.push_back(row);
  }
  ordered_json out;
  out["command"] = "ideal-norms";
  out["ideals"] = rows;
  std::cerr << table.str();
  emit(cfg, out);
  return 0;
}

std::optional<Ideal> parse_ideal(const std::string& spec, const AlgebraSpec& a) {
  if (spec.empty()) return std::nullopt;
  std::vector<std::size_t> blocks;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(item, &pos);
    } catch (const std::exception&) {
      throw Error("--ideal: cannot parse '" + item + "'");
    }
    if (pos != item.size() || v < 1 || static_cast<std::size_t>(v) > a.blocks())
      throw Error("--ideal: block index out of range: " + item);
    blocks.push_back(static_cast<std::size_t>(v - 1));
  }
  return Ideal::from_blocks(a, blocks);
}

int cmd_maxmix(const RunConfig& cfg) {
  const auto tol = cfg.tolerances();
  const auto w = load(cfg.omega, "--omega", cfg);
  const auto k = parse_ideal(cfg.ideal, w.algebra());
  const auto mm = is_maximally_mixed(w, k, tol);
  ordered_json rep;
  rep["command"] = "maxmix";
  rep["mode"] = "maxmix";
  merge_into(rep, io::to_json(mm.decision));
  ordered_json qb = ordered_json::array();
  for (auto b : mm.quotient_blocks) qb.push_back(b + 1);
  rep["quotient_blocks"] = qb;
  rep["inputs"] = {{"omega", io::to_json(w)}};
  rep["tolerances"] = tolerances_json(tol);
  rep["seed"] = cfg.seed;
  std::cerr << "verdict: " << to_string(mm.decision.verdict) << "\n" << mm.decision.explanation << "\n";
  emit(cfg, rep);
  return exit_code(mm.decision.verdict);
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "yes") return Verdict::yes;
  if (s == "no") return Verdict::no;
  if (s == "indeterminate") return Verdict::indeterminate;
  throw Error("report: unknown verdict '" + s + "'");
}

// Re-derive a saved reach report's verdict with the Choi oracle.
int cmd_oracle(const RunConfig& cfg) {
  if (cfg.report.empty()) throw Error("missing --report");
  const auto j = io::read_json_file(cfg.report);
  if (!j.contains("inputs") || !j["inputs"].contains("omega") || !j["inputs"].contains("rho"))
    throw Error(cfg.report + ": inputs.omega / inputs.rho: missing field (only reach reports can be re-checked)");
  if (!j.contains("verdict") || !j["verdict"].is_string()) throw Error(cfg.report + ": verdict: missing field");
  const auto w = io::functional_from_json(j["inputs"]["omega"], "inputs.omega");
  const auto r = io::functional_from_json(j["inputs"]["rho"], "inputs.rho");
  const std::string mode = j.value("mode", "hermitian");
  Tolerances tol = cfg.tolerances();
  if (j.contains("tolerances")) {
    tol.eig = j["tolerances"].value("eig", tol.eig);
    tol.feas = j["tolerances"].value("feas", tol.feas);
    tol.dec = j["tolerances"].value("dec", tol.dec);
  }
  const auto saved = verdict_from_string(j["verdict"].get<std::string>());
  const auto fresh = decide(mode, w, r, tol);
  const auto o = oracle::choi_membership_oracle(w, r, mode != "state", tol);
  ordered_json out;
  out["command"] = "oracle";
  out["report"] = cfg.report;
  out["saved_verdict"] = to_string(saved);
  out["recomputed_verdict"] = to_string(fresh.verdict);
  out["oracle"] = oracle_json(o, saved);
  const bool bad = disagrees(saved, o.verdict()) || disagrees(saved, fresh.verdict);
  out["agrees"] = !bad;
  std::cerr << "saved " << to_string(saved) << ", recomputed " << to_string(fresh.verdict) << ", oracle "
            << to_string(o.verdict()) << (bad ? " -> DISAGREEMENT" : " -> consistent") << "\n";
  emit(cfg, out);
  return bad ? kExitDisagreement : 0;
}

int cmd_convert(const RunConfig& cfg) {
  const auto tol = cfg.tolerances();
  if (cfg.channel.empty()) throw Error("missing --channel");
  const auto ch = io::read_channel(cfg.channel);
  ordered_json out;
  if (cfg.to == "choi")
    out = io::to_json(ch.as_choi());
  else if (cfg.to == "kraus")
    out = io::to_json(ch.as_kraus(tol));
  else
    throw Error("--to must be kraus or choi");
  emit(cfg, out);
  return 0;
}

int cmd_selftest(const RunConfig& cfg) {
  std::vector<int> ids = cfg.suites;
  if (ids.empty())
    for (int i = 1; i <= static_cast<int>(acceptance::suites().size()); ++i) ids.push_back(i);
  ordered_json rows = ordered_json::array();
  bool ok = true;
  for (int id : ids) {
    const auto r = acceptance::run_suite(id, cfg.seed);
    std::cout << acceptance::format_line(r) << std::endl;
    ok = ok && r.passed;
    ordered_json row;
    row["criterion"] = r.id;
    row["title"] = r.title;
    row["passed"] = r.passed;
    row["detail"] = r.detail;
    rows.push_back(row);
  }
  std::cout << (ok ? "selftest: all suites passed" : "selftest: FAILED") << std::endl;
  if (!cfg.out.empty()) {
    ordered_json out;
    out["command"] = "selftest";
    out["seed"] = cfg.seed;
    out["suites"] = rows;
    out["passed"] = ok;
    emit(cfg, out);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vnmix: state reachability under unital completely positive maps on finite direct sums of matrix algebras"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--algebra", cfg.algebra, "algebra file the inputs must match");
    sub->add_option("--tol-eig", cfg.tol_eig, "eigenvalue cutoff");
    sub->add_option("--tol-feas", cfg.tol_feas, "feasibility tolerance");
    sub->add_option("--tol-dec", cfg.tol_dec, "decision band");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out, "output file (stdout when omitted)");
  };
  auto pair = [&](CLI::App* sub) {
    sub->add_option("--omega", cfg.omega, "functional file for omega")->required();
    sub->add_option("--rho", cfg.rho, "functional file for rho")->required();
  };

  auto* reach = app.add_subcommand("reach", "decide whether rho is reachable from omega");
  pair(reach);
  common(reach);
  reach->add_option("--mode", cfg.mode, "auto, state, positive, hermitian or general");
  reach->add_flag("--with-oracle", cfg.with_oracle, "cross-check with the Choi feasibility oracle");

  auto* transport = app.add_subcommand("transport", "build the transport map as a Kraus channel");
  pair(transport);
  common(transport);

  auto* exact = app.add_subcommand("exact-channel", "construct a channel with omega o phi = rho via GNS");
  pair(exact);
  common(exact);

  auto* jordan = app.add_subcommand("jordan", "Jordan decomposition of a hermitian functional");
  jordan->add_option("--omega", cfg.omega, "functional file")->required();
  common(jordan);

  auto* norms = app.add_subcommand("ideal-norms", "restricted norms over all ideals");
  norms->add_option("--omega", cfg.omega, "functional file")->required();
  norms->add_option("--rho", cfg.rho, "optional second functional");
  common(norms);

  auto* maxmix = app.add_subcommand("maxmix", "maximal mixedness of a state");
  maxmix->add_option("--omega", cfg.omega, "state file")->required();
  maxmix->add_option("--ideal", cfg.ideal, "ideal K annihilated by omega, as 1-based blocks (e.g. 2,3)");
  common(maxmix);

  auto* orc = app.add_subcommand("oracle", "re-check a saved reach report with the Choi oracle");
  orc->add_option("--report", cfg.report, "decision report")->required();
  common(orc);

  auto* convert = app.add_subcommand("convert", "convert a channel file between Kraus and Choi form");
  convert->add_option("--channel", cfg.channel, "channel file")->required();
  convert->add_option("--to", cfg.to, "kraus or choi");
  common(convert);

  auto* selftest = app.add_subcommand("selftest", "run the acceptance property suites");
  selftest->add_option("--suite", cfg.suites, "run only these suites (1-7)");
  common(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*reach) return cmd_reach(cfg);
    if (*transport) return cmd_transport(cfg);
    if (*exact) return cmd_exact(cfg);
    if (*jordan) return cmd_jordan(cfg);
    if (*norms) return cmd_ideal_norms(cfg);
    if (*maxmix) return cmd_maxmix(cfg);
    if (*orc) return cmd_oracle(cfg);
    if (*convert) return cmd_convert(cfg);
    if (*selftest) return cmd_selftest(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
