#ifndef VNMIX_ACCEPTANCE_HPP
#define VNMIX_ACCEPTANCE_HPP

// Seeded property suites 1-7, shared by the acceptance test binary and the
// `selftest` subcommand. Each suite returns pass/fail plus counts and the
// worst observed residual.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vnmix/algebra.hpp"
#include "vnmix/channels.hpp"
#include "vnmix/exact_channel.hpp"
#include "vnmix/functionals.hpp"
#include "vnmix/oracle.hpp"
#include "vnmix/reachability.hpp"

namespace vnmix::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::mt19937_64 suite_rng(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

// random x normalized to operator norm 1
inline Element unit_element(const AlgebraSpec& a, std::mt19937_64& rng) {
  Element x = oracle::random_element(a, rng);
  const double n = x.norm();
  return n > 0.0 ? x * (1.0 / n) : x;
}

}  // namespace detail

// 1. transport map on pairs satisfying the hermitian criterion
inline CriterionResult transport_construction(std::uint64_t seed, int pairs = 200, int probes = 50) {
  CriterionResult res{1, "transport construction", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 1);
  double worst_unital = 0.0, worst_cp = 0.0, worst_comp = 0.0;
  int failures = 0;
  for (int k = 0; k < pairs; ++k) {
    const auto a = oracle::random_algebra(rng);
    // every fourth ω is a state
    const Functional w = k % 4 == 0 ? oracle::random_state(a, rng()) : oracle::random_hermitian(a, rng());
    const Functional r = oracle::random_companion(w, rng(), true);
    try {
      const auto t = build_transport_map(w, r);
      const double u = (t.apply(Element::identity(a)) - Element::identity(a)).norm();
      const double cp = -t.choi.min_eigenvalue();
      double comp = 0.0;
      for (int p = 0; p < probes; ++p) {
        const auto x = detail::unit_element(a, rng);
        comp = std::max(comp, std::abs(evaluate(w, t.apply(x)) - evaluate(r, x)) / x.norm());
      }
      worst_unital = std::max(worst_unital, u);
      worst_cp = std::max(worst_cp, cp);
      worst_comp = std::max(worst_comp, comp);
      if (u > 1e-9 || cp > 1e-9 || comp > 1e-8) ++failures;
    } catch (const Error& e) {
      ++failures;
    }
  }
  res.passed = failures == 0;
  res.detail = std::to_string(pairs) + " pairs, " + std::to_string(failures) + " failures; max |psi(1)-1| " +
               detail::sci(worst_unital) + ", max -min eig(choi) " + detail::sci(worst_cp) +
               ", max composition error " + detail::sci(worst_comp);
  return res;
}

// 2. ideal-norm criterion, center criterion and Choi oracle agree on states
inline CriterionResult state_biconditional(std::uint64_t seed, int pairs = 100, double min_margin = 1e-8) {
  CriterionResult res{2, "state reachability biconditional", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 2);
  int compared = 0, skipped = 0, disagreements = 0, yes = 0;
  for (int k = 0; k < pairs; ++k) {
    const auto a = oracle::random_algebra(rng);
    const Functional w = oracle::random_state(a, rng());
    // half the pairs share ω's center restriction
    oracle::StateOptions opt;
    if (k % 2 == 0) opt.center = restrict_to_center(w).real_values();
    Functional r = oracle::random_state(a, rng(), opt);
    const auto dm = check_more_mixed(w, r);
    const auto ds = check_state_reachable(w, r);
    // ties (yes at rounding level) are kept; otherwise require a clear margin
    if (ds.verdict != Verdict::yes && std::abs(ds.margin) < min_margin) {
      ++skipped;
      continue;
    }
    const auto orc = oracle::choi_membership_oracle(w, r);
    ++compared;
    if (ds.verdict == Verdict::yes) ++yes;
    if (dm.verdict != ds.verdict || orc.verdict() != ds.verdict) ++disagreements;
  }
  res.passed = disagreements == 0 && compared > 0;
  res.detail = std::to_string(compared) + " pairs compared (" + std::to_string(yes) + " yes), " +
               std::to_string(skipped) + " inside margin filter, " + std::to_string(disagreements) +
               " disagreements";
  return res;
}

// 3. conditions (A) and (B) coincide; yes verdicts carry valid witnesses
inline CriterionResult hermitian_conditions(std::uint64_t seed, int pairs = 200) {
  CriterionResult res{3, "hermitian criteria (A) and (B)", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 3);
  int compared = 0, disagreements = 0, yes = 0, bad_witness = 0;
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const auto a = oracle::random_algebra(rng);
    const Functional w = oracle::random_hermitian(a, rng());
    Functional r = oracle::random_companion(w, rng(), k % 3 != 0);
    if (k % 5 == 0) r = oracle::random_hermitian(a, rng());  // generic traces
    const auto da = check_hermitian_reachable(w, r);
    const auto db = check_hermitian_reachable_general(w, r);
    if (da.verdict == Verdict::indeterminate || db.decision.verdict == Verdict::indeterminate) continue;
    ++compared;
    if (da.verdict != db.decision.verdict) ++disagreements;
    if (db.decision.verdict != Verdict::yes) continue;
    ++yes;
    if (!db.rho1 || !db.rho2) {
      ++bad_witness;
      continue;
    }
    const auto jw = jordan_decompose(w);
    const auto& r1 = *db.rho1;
    const auto& r2 = *db.rho2;
    double v = (r1 - r2).max_entry_difference(r);
    v = std::max(v, std::abs(r1.total_mass() - jw.positive_part.total_mass()));
    v = std::max(v, std::abs(r2.total_mass() - jw.negative_part.total_mass()));
    for (std::size_t i = 0; i < a.blocks(); ++i) {
      v = std::max(v, -numerics::min_eigenvalue(r1.density(i)));
      v = std::max(v, -numerics::min_eigenvalue(r2.density(i)));
    }
    for (const auto& j : enumerate_ideals(a).ideals) {
      v = std::max(v, ideal_norm(r1, j) - ideal_norm(jw.positive_part, j));
      v = std::max(v, ideal_norm(r2, j) - ideal_norm(jw.negative_part, j));
    }
    worst = std::max(worst, v);
    if (v > 1e-9) ++bad_witness;
  }
  res.passed = disagreements == 0 && bad_witness == 0 && compared > 0;
  res.detail = std::to_string(compared) + " pairs compared (" + std::to_string(yes) + " yes), " +
               std::to_string(disagreements) + " disagreements, " + std::to_string(bad_witness) +
               " bad witnesses, max witness violation " + detail::sci(worst);
  return res;
}

// 4. exact channel construction and its agreement with the center criterion
inline CriterionResult exact_channel(std::uint64_t seed, int feasible_pairs = 50, int extra_pairs = 50,
                                     double min_margin = 1e-7) {
  CriterionResult res{4, "exact channel pipeline", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 4);
  int built = 0, build_failures = 0, compared = 0, disagreements = 0;
  double worst_unital = 0.0, worst_comp = 0.0;
  auto center_with_gap = [&](const AlgebraSpec& a) {
    // random center, sometimes with an empty block
    std::vector<double> c(a.blocks());
    double s = 0.0;
    for (auto& v : c) s += (v = std::uniform_real_distribution<double>(0.05, 1.0)(rng));
    if (a.blocks() > 1 && rng() % 4 == 0) {
      s -= c.back();
      c.back() = 0.0;
    }
    for (auto& v : c) v /= s;
    return c;
  };
  auto ranks_for = [&](const AlgebraSpec& a, const std::vector<double>& c) {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < a.blocks(); ++i)
      r.push_back(c[i] == 0.0 ? 0 : std::uniform_int_distribution<std::size_t>(1, a.dim(i))(rng));
    return r;
  };
  for (int k = 0; k < feasible_pairs + extra_pairs; ++k) {
    const auto a = oracle::random_algebra(rng);
    const bool feasible = k < feasible_pairs;
    const auto c = center_with_gap(a);
    const Functional w = oracle::random_state(a, rng(), {c, ranks_for(a, c)});
    oracle::StateOptions ropt;
    if (feasible) {
      ropt.center = c;
      ropt.ranks = ranks_for(a, c);
    }
    const Functional r = oracle::random_state(a, rng(), ropt);
    const auto ds = check_state_reachable(w, r);
    const auto ext = extension_feasible(w, r);
    if (ds.verdict == Verdict::yes || std::abs(ds.margin) >= min_margin) {
      ++compared;
      const bool agree = (ds.verdict == Verdict::yes) == (ext.status == numerics::Feasibility::feasible) &&
                         (ds.verdict == Verdict::no) == (ext.status == numerics::Feasibility::infeasible);
      if (!agree) ++disagreements;
    }
    if (!feasible || ext.status != numerics::Feasibility::feasible) {
      if (feasible) ++build_failures;
      continue;
    }
    try {
      const auto ch = construct_exact_channel(w, r, ext);
      ++built;
      worst_unital = std::max(worst_unital, ch.unitality_residual);
      worst_comp = std::max(worst_comp, ch.composition_residual);
      bool in_algebra = true;
      for (const auto& kr : ch.channel.kraus()) in_algebra = in_algebra && kr.algebra() == a;
      if (!in_algebra || ch.unitality_residual > 1e-8 || ch.composition_residual > 1e-7) ++build_failures;
    } catch (const Error&) {
      ++build_failures;
    }
  }
  res.passed = build_failures == 0 && disagreements == 0 && built == feasible_pairs;
  res.detail = std::to_string(built) + "/" + std::to_string(feasible_pairs) + " channels built, " +
               std::to_string(build_failures) + " failures; max unitality " + detail::sci(worst_unital) +
               ", max composition " + detail::sci(worst_comp) + "; " + std::to_string(compared) +
               " feasibility verdicts compared, " + std::to_string(disagreements) + " disagreements";
  return res;
}

// 5. Jordan norm identity and central scalings
inline CriterionResult jordan_scalings(std::uint64_t seed, int count = 200) {
  CriterionResult res{5, "Jordan norm and central scalings", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 5);
  double worst_norm = 0.0, worst_scaling = 0.0;
  int scaled = 0, failures = 0;
  for (int k = 0; k < count; ++k) {
    const auto a = oracle::random_algebra(rng);
    const Functional w = oracle::random_hermitian(a, rng());
    const auto jw = jordan_decompose(w);
    // ||ω|| attained at the spectral sign element
    std::vector<Matrix> sgn;
    for (const auto& d : w.densities())
      sgn.push_back(numerics::spectral_apply(d, [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }));
    const double attained = evaluate(w, Element(a, sgn)).real();
    const double e1 = std::abs(w.norm() - (jw.positive_part.total_mass() + jw.negative_part.total_mass()));
    const double e2 = std::abs(attained - w.norm());
    worst_norm = std::max({worst_norm, e1, e2});
    if (e1 > 1e-10 || e2 > 1e-10) ++failures;

    const Functional r = oracle::random_companion(w, rng(), k % 4 != 0);
    if (check_hermitian_reachable(w, r).verdict != Verdict::yes) continue;
    ++scaled;
    const double s = central_scaling_residual(derive_central_scalings(w, r), w, r);
    worst_scaling = std::max(worst_scaling, s);
    if (s > 1e-10) ++failures;
  }
  res.passed = failures == 0;
  res.detail = std::to_string(count) + " functionals, max norm identity error " + detail::sci(worst_norm) + "; " +
               std::to_string(scaled) + " scalings, max residual " + detail::sci(worst_scaling) + "; " +
               std::to_string(failures) + " failures";
  return res;
}

// 6. maximal mixedness and symmetry of state reachability
inline CriterionResult maximal_mixedness(std::uint64_t seed, int states = 100, int pairs = 200) {
  CriterionResult res{6, "maximal mixedness and symmetry", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 6);
  int not_yes = 0, asymmetric = 0;
  for (int k = 0; k < states; ++k) {
    const auto a = oracle::random_algebra(rng);
    Functional w = oracle::random_state(a, rng());
    if (k % 4 == 0) w = Functional::tracial(a, restrict_to_center(w).real_values());
    if (is_maximally_mixed(w).decision.verdict != Verdict::yes) ++not_yes;
  }
  for (int k = 0; k < pairs; ++k) {
    const auto a = oracle::random_algebra(rng);
    const Functional w = oracle::random_state(a, rng());
    oracle::StateOptions opt;
    if (k % 2 == 0) opt.center = restrict_to_center(w).real_values();
    const Functional r = oracle::random_state(a, rng(), opt);
    if (check_state_reachable(w, r).verdict != check_state_reachable(r, w).verdict) ++asymmetric;
  }
  res.passed = not_yes == 0 && asymmetric == 0;
  res.detail = std::to_string(states) + " states, " + std::to_string(not_yes) + " not maximally mixed; " +
               std::to_string(pairs) + " pairs, " + std::to_string(asymmetric) + " asymmetric";
  return res;
}

// 7. variational ideal norm and Kraus/Choi roundtrip
inline CriterionResult oracle_integrity(std::uint64_t seed, int norms = 500, int maps = 100) {
  CriterionResult res{7, "oracle integrity", true, "", 0.0};
  auto rng = detail::suite_rng(seed, 7);
  double worst_norm = 0.0, worst_roundtrip = 0.0;
  for (int k = 0; k < norms; ++k) {
    const auto a = oracle::random_algebra(rng);
    const Functional w = k % 3 == 0 ? oracle::random_state(a, rng()) : oracle::random_hermitian(a, rng());
    const auto j = Ideal::from_mask(a, rng() % (std::uint64_t{1} << a.blocks()));
    worst_norm = std::max(worst_norm, std::abs(oracle::variational_ideal_norm(w, j, rng()) - ideal_norm(w, j)));
  }
  for (int k = 0; k < maps; ++k) {
    const auto a = oracle::random_algebra(rng);
    const int nk = 1 + static_cast<int>(rng() % 4);
    const auto phi = random_elementary(a, nk, rng());
    const auto c = choi_of(phi);
    worst_roundtrip = std::max(worst_roundtrip, choi_of(kraus_from_choi(c)).max_difference(c));
  }
  res.passed = worst_norm <= 1e-9 && worst_roundtrip <= 1e-9;
  res.detail = std::to_string(norms) + " ideal norms, max gap " + detail::sci(worst_norm) + "; " +
               std::to_string(maps) + " roundtrips, max residual " + detail::sci(worst_roundtrip);
  return res;
}

using Suite = std::function<CriterionResult(std::uint64_t)>;

inline std::vector<Suite> suites() {
  return {[](std::uint64_t s) { return transport_construction(s); },
          [](std::uint64_t s) { return state_biconditional(s); },
          [](std::uint64_t s) { return hermitian_conditions(s); },
          [](std::uint64_t s) { return exact_channel(s); },
          [](std::uint64_t s) { return jordan_scalings(s); },
          [](std::uint64_t s) { return maximal_mixedness(s); },
          [](std::uint64_t s) { return oracle_integrity(s); }};
}

// Runs one suite, turning exceptions into failures and recording wall time.
inline CriterionResult run_suite(int id, std::uint64_t seed) {
  const auto all = suites();
  if (id < 1 || id > static_cast<int>(all.size())) throw Error("no acceptance suite " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = all[id - 1](seed);
  } catch (const std::exception& e) {
    r = {id, "suite " + std::to_string(id), false, std::string("exception: ") + e.what(), 0.0};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << " [" << r.title << "]: " << (r.passed ? "PASS" : "FAIL") << " - " << r.detail;
  return os.str();
}

}  // namespace vnmix::acceptance

#endif  // VNMIX_ACCEPTANCE_HPP
