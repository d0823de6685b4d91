#ifndef VNMIX_REACHABILITY_HPP
#define VNMIX_REACHABILITY_HPP

// Decision procedures for the mixing preorder "ρ ∈ closure(ω∘E(A))" and the
// constructive transport map.
//
// All checks reduce their quantifiers to per-block inequalities: "for every
// ideal J" is linear over block supports and "for every c ∈ Z_+" is linear
// in c, so singleton supports plus the total mass carry the full condition.
// For positive functionals the explicit enumeration over all 2^B ideals is
// kept as the primary path (and the certificate source) when B is within the
// enumeration cap.
//
// Verdict rule, with v the worst constraint violation (|difference| for
// equalities, lhs - rhs for inequalities) and η = dec·max(||ω||, ||ρ||, 1):
//   v <= 1e-3·η        yes (ties at rounding level)
//   1e-3·η < v < η     indeterminate
//   v >= η             no
// The reported margin is -v.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vnmix/algebra.hpp"
#include "vnmix/channels.hpp"
#include "vnmix/functionals.hpp"

namespace vnmix {

enum class Verdict { yes, no, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

struct Certificate {
  std::string kind;                       // "ideal", "block", "mass", "witness", ...
  std::optional<Ideal> ideal;             // violated ideal
  std::optional<CenterElement> weight;    // violated central weight c ≥ 0
  std::map<std::string, double> values;   // the compared quantities
};

struct Decision {
  Verdict verdict = Verdict::indeterminate;
  double margin = 0.0;
  double band = 0.0;  // η used for the verdict
  std::optional<Certificate> certificate;
  std::string explanation;
  std::string theorem;
};

inline constexpr double kTieFraction = 1e-3;

inline Verdict verdict_from_violation(double v, double eta) {
  if (v <= kTieFraction * eta) return Verdict::yes;
  if (v >= eta) return Verdict::no;
  return Verdict::indeterminate;
}

inline double decision_band(const Functional& w, const Functional& r, const Tolerances& tol) {
  return tol.dec * std::max({w.norm(), r.norm(), 1.0});
}

namespace detail {

inline Decision make_decision(double violation, double eta, std::string theorem) {
  Decision d;
  d.margin = 0.0 - violation;
  d.band = eta;
  d.verdict = verdict_from_violation(violation, eta);
  d.theorem = std::move(theorem);
  return d;
}

inline std::string block_label(std::size_t i) { return "block " + std::to_string(i + 1); }

struct BlockSpectra {
  std::vector<double> trace, trace_norm, pos_mass, neg_mass;
};

inline BlockSpectra block_spectra(const Functional& w) {
  BlockSpectra s;
  for (const auto& d : w.densities()) {
    const auto es = numerics::eigh_hermitian(d);
    double p = 0.0, n = 0.0;
    for (double x : es.values) (x > 0 ? p : n) += std::abs(x);
    s.pos_mass.push_back(p);
    s.neg_mass.push_back(n);
    s.trace.push_back(d.trace().real());
    s.trace_norm.push_back(p + n);
  }
  return s;
}

}  // namespace detail

inline constexpr const char* kIdealCriterion =
    "ideal-norm criterion: rho(1) = omega(1) and ||rho|J|| <= ||omega|J|| for every ideal J";
inline constexpr const char* kCenterCriterion =
    "center criterion for states: rho|Z = omega|Z";
inline constexpr const char* kHermitianCriterionA =
    "hermitian criterion (A): rho|Z = omega|Z and ||c rho|| <= ||c omega|| for every c in Z+";
inline constexpr const char* kHermitianCriterionB =
    "hermitian criterion (B): rho = rho1 - rho2, rho1(1) = omega+(1), rho2(1) = omega-(1), "
    "||rho1|J|| <= ||omega+|J||, ||rho2|J|| <= ||omega-|J|| for every ideal J";

// ρ more mixed than ω, for positive functionals.
inline Decision check_more_mixed(const Functional& w, const Functional& r, const Tolerances& tol = {},
                                 std::size_t cap = kIdealEnumerationCap) {
  require_same(w.algebra(), r.algebra());
  if (!w.is_positive(tol.eig) || !r.is_positive(tol.eig))
    throw Error("check_more_mixed: functionals must be positive");
  const double eta = decision_band(w, r, tol);
  const auto& alg = w.algebra();
  const auto mw = restrict_to_center(w).real_values();
  const auto mr = restrict_to_center(r).real_values();
  const double mass_gap = std::abs(r.total_mass() - w.total_mass());

  double worst = 0.0;
  std::optional<Ideal> worst_ideal;
  bool enumerated = alg.blocks() <= cap;
  if (enumerated) {
    // positive functionals: ||ω|J|| = Σ_{i∈J} μ_i
    const auto lattice = enumerate_ideals(alg, cap);
    for (const auto& j : lattice.ideals) {
      double v = 0.0;
      for (auto i : j.blocks()) v += mr[i] - mw[i];
      if (!worst_ideal || v > worst) {
        worst = v;
        worst_ideal = j;
      }
    }
  } else {
    for (std::size_t i = 0; i < alg.blocks(); ++i) {
      const double v = mr[i] - mw[i];
      if (!worst_ideal || v > worst) {
        worst = v;
        worst_ideal = Ideal::from_blocks(alg, {i});
      }
    }
  }
  const double violation = std::max(mass_gap, worst);
  Decision d = detail::make_decision(violation, eta, kIdealCriterion);
  if (d.verdict != Verdict::yes) {
    Certificate c;
    if (worst >= mass_gap && worst_ideal) {
      c.kind = "ideal";
      c.ideal = worst_ideal;
      c.values["rho_ideal_norm"] = ideal_norm(r, *worst_ideal);
      c.values["omega_ideal_norm"] = ideal_norm(w, *worst_ideal);
    } else {
      c.kind = "mass";
      c.values["rho_mass"] = r.total_mass();
      c.values["omega_mass"] = w.total_mass();
    }
    d.certificate = c;
  }
  d.explanation = std::string(enumerated ? "checked all " + std::to_string(std::size_t{1} << alg.blocks()) + " ideals"
                                         : "checked per-block reduction (singleton ideals and total mass)") +
                  "; worst violation " + std::to_string(violation) +
                  (d.certificate && d.certificate->ideal ? " at ideal " + d.certificate->ideal->to_string() : "");
  return d;
}

inline Decision check_state_reachable(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  require_same(w.algebra(), r.algebra());
  if (!w.is_state(tol.eig) || !r.is_state(tol.eig)) throw Error("check_state_reachable: inputs must be states");
  const double eta = decision_band(w, r, tol);
  const auto mw = restrict_to_center(w).real_values();
  const auto mr = restrict_to_center(r).real_values();
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < mw.size(); ++i) {
    const double v = std::abs(mr[i] - mw[i]);
    if (v > worst) {
      worst = v;
      at = i;
    }
  }
  Decision d = detail::make_decision(worst, eta, kCenterCriterion);
  if (d.verdict != Verdict::yes) {
    Certificate c;
    c.kind = "block";
    c.ideal = Ideal::from_blocks(w.algebra(), {at});
    c.values["rho_center"] = mr[at];
    c.values["omega_center"] = mw[at];
    d.certificate = c;
  }
  d.explanation = "center restrictions differ by at most " + std::to_string(worst) +
                  (d.verdict == Verdict::yes ? "; states with equal center restrictions are mutually reachable"
                                             : " (at " + detail::block_label(at) + ")");
  return d;
}

// Condition (A) reduced to blocks: tr D_i^ρ = tr D_i^ω and ||D_i^ρ||_1 <= ||D_i^ω||_1.
inline Decision check_hermitian_reachable(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  require_same(w.algebra(), r.algebra());
  if (!w.is_hermitian(tol.eig) || !r.is_hermitian(tol.eig))
    throw Error("check_hermitian_reachable: functionals must be hermitian");
  const double eta = decision_band(w, r, tol);
  const auto sw = detail::block_spectra(w);
  const auto sr = detail::block_spectra(r);
  double worst = -INFINITY;
  std::size_t at = 0;
  bool trace_violation = false;
  for (std::size_t i = 0; i < sw.trace.size(); ++i) {
    const double dt = std::abs(sr.trace[i] - sw.trace[i]);
    const double dn = sr.trace_norm[i] - sw.trace_norm[i];
    if (dt > worst) {
      worst = dt;
      at = i;
      trace_violation = true;
    }
    if (dn > worst) {
      worst = dn;
      at = i;
      trace_violation = false;
    }
  }
  Decision d = detail::make_decision(worst, eta, kHermitianCriterionA);
  if (d.verdict != Verdict::yes) {
    Certificate c;
    c.kind = trace_violation ? "center" : "weight";
    c.ideal = Ideal::from_blocks(w.algebra(), {at});
    c.weight = c.ideal->indicator();
    c.values["rho_trace"] = sr.trace[at];
    c.values["omega_trace"] = sw.trace[at];
    c.values["rho_weighted_norm"] = sr.trace_norm[at];
    c.values["omega_weighted_norm"] = sw.trace_norm[at];
    d.certificate = c;
  }
  d.explanation = d.verdict == Verdict::yes
                      ? "per-block traces agree and trace norms do not increase"
                      : std::string(trace_violation ? "center restrictions differ" : "trace norm increases") + " at " +
                            detail::block_label(at);
  return d;
}

struct GeneralDecision {
  Decision decision;
  std::optional<Functional> rho1;  // positive, rho1 - rho2 = rho
  std::optional<Functional> rho2;
};

// Condition (B) in closed form: per block, tr ρ_+ <= tr ω_+, tr ρ_- <= tr ω_-
// and equal traces. Witness ρ1 = ρ_+ + s, ρ2 = ρ_- + s with s a multiple of
// the support projection of (D^ω)_+ that restores the exact block traces.
inline GeneralDecision check_hermitian_reachable_general(const Functional& w, const Functional& r,
                                                         const Tolerances& tol = {}) {
  require_same(w.algebra(), r.algebra());
  if (!w.is_hermitian(tol.eig) || !r.is_hermitian(tol.eig))
    throw Error("check_hermitian_reachable_general: functionals must be hermitian");
  const double eta = decision_band(w, r, tol);
  const auto sw = detail::block_spectra(w);
  const auto sr = detail::block_spectra(r);
  double worst = -INFINITY;
  std::size_t at = 0;
  for (std::size_t i = 0; i < sw.trace.size(); ++i) {
    const double v = std::max({std::abs(sr.trace[i] - sw.trace[i]), sr.pos_mass[i] - sw.pos_mass[i],
                               sr.neg_mass[i] - sw.neg_mass[i]});
    if (v > worst) {
      worst = v;
      at = i;
    }
  }
  GeneralDecision g;
  g.decision = detail::make_decision(worst, eta, kHermitianCriterionB);
  if (g.decision.verdict != Verdict::yes) {
    Certificate c;
    c.kind = "block";
    c.ideal = Ideal::from_blocks(w.algebra(), {at});
    c.values["rho_positive_mass"] = sr.pos_mass[at];
    c.values["omega_positive_mass"] = sw.pos_mass[at];
    c.values["rho_negative_mass"] = sr.neg_mass[at];
    c.values["omega_negative_mass"] = sw.neg_mass[at];
    g.decision.certificate = c;
    g.decision.explanation = "no positive decomposition with the required masses at " + detail::block_label(at);
    return g;
  }

  const auto jr = jordan_decompose(r, tol);
  const auto jw = jordan_decompose(w, tol);
  std::vector<Matrix> d1, d2;
  for (std::size_t i = 0; i < sw.trace.size(); ++i) {
    const double slack = std::max(0.0, sw.pos_mass[i] - sr.pos_mass[i]);
    Matrix s(w.algebra().dim(i), w.algebra().dim(i));
    if (slack > 0.0) {
      const Matrix p = numerics::range_projection(jw.positive_part.density(i), tol.eig);
      const double rank = p.trace().real();
      if (rank > 0.5) s = p * (slack / rank);
    }
    d1.push_back(jr.positive_part.density(i) + s);
    d2.push_back(jr.negative_part.density(i) + s);
  }
  g.rho1 = Functional(w.algebra(), std::move(d1));
  g.rho2 = Functional(w.algebra(), std::move(d2));
  g.decision.explanation = "witness rho1 = rho+ + s, rho2 = rho- + s with per-block filler s on supp(omega+)";
  return g;
}

struct CentralScalings {
  CenterElement c_plus;
  CenterElement c_minus;
  CenterElement p_plus_central;   // support of ω_+|Z
  CenterElement p_minus_central;  // support of ω_-|Z
};

// Largest per-entry deviation in the three scaling identities
//   ρ_+|Z = c_+ ω_+|Z,  ρ_-|Z = c_- ω_-|Z,  (p⁺ - c_+) ω_+|Z = (p⁻ - c_-) ω_-|Z
// and of the bounds 0 <= c_± <= p^±.
inline double central_scaling_residual(const CentralScalings& cs, const Functional& w, const Functional& r,
                                       const Tolerances& tol = {}) {
  const auto jw = jordan_decompose(w, tol);
  const auto jr = jordan_decompose(r, tol);
  const auto wp = restrict_to_center(jw.positive_part).real_values();
  const auto wm = restrict_to_center(jw.negative_part).real_values();
  const auto rp = restrict_to_center(jr.positive_part).real_values();
  const auto rm = restrict_to_center(jr.negative_part).real_values();
  double res = 0.0;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const double cp = cs.c_plus.re(i), cm = cs.c_minus.re(i);
    const double pp = cs.p_plus_central.re(i), pm = cs.p_minus_central.re(i);
    res = std::max(res, std::abs(rp[i] - cp * wp[i]));
    res = std::max(res, std::abs(rm[i] - cm * wm[i]));
    res = std::max(res, std::abs((pp - cp) * wp[i] - (pm - cm) * wm[i]));
    res = std::max({res, -cp, -cm, cp - pp, cm - pm});
  }
  return res;
}

inline CentralScalings derive_central_scalings(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  const auto pre = check_hermitian_reachable(w, r, tol);
  if (pre.verdict != Verdict::yes)
    throw Error("central scalings: reachability precondition fails (" + pre.explanation + ")");
  const auto jw = jordan_decompose(w, tol);
  const auto jr = jordan_decompose(r, tol);
  const auto wp = restrict_to_center(jw.positive_part).real_values();
  const auto wm = restrict_to_center(jw.negative_part).real_values();
  const auto rp = restrict_to_center(jr.positive_part).real_values();
  const auto rm = restrict_to_center(jr.negative_part).real_values();
  const double cut = tol.eig * std::max(1.0, w.norm());
  std::vector<double> cp, cm, pp, pm;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    pp.push_back(wp[i] > cut ? 1.0 : 0.0);
    pm.push_back(wm[i] > cut ? 1.0 : 0.0);
    cp.push_back(wp[i] > cut ? std::clamp(rp[i] / wp[i], 0.0, 1.0) : 0.0);
    cm.push_back(wm[i] > cut ? std::clamp(rm[i] / wm[i], 0.0, 1.0) : 0.0);
  }
  const auto& a = w.algebra();
  return {CenterElement::real(a, cp), CenterElement::real(a, cm), CenterElement::real(a, pp),
          CenterElement::real(a, pm)};
}

// ψ = c_+ p_+ ρ_Z⁺ + (1 - c_+ p_+)(ρ_Z⁻ + (1 - q⁻) θ)
// with p_+ = supp(ω_+) in A, ρ_Z^± the central decompositions of ρ_±,
// q⁻ = ρ_Z⁻(1) the central support of ρ_-|Z and θ the normalized block trace.
// Using q⁻ (not the support of ω_-|Z) in the last term keeps ψ unital on
// blocks where ω_- has mass but ρ_- does not; ω∘ψ = ρ is unaffected because
// ρ_-|Z vanishes off q⁻.
struct TransportMap {
  CentralScalings scalings;
  Element p_plus;               // support projection of ω_+
  CenterValuedMap rho_plus_z;   // ρ_Z⁺
  CenterValuedMap rho_minus_z;  // ρ_Z⁻
  CenterElement q_minus;        // ρ_Z⁻(1)
  CenterValuedMap theta;
  ModuleMapChoi choi;
  KrausMap kraus;

  Element apply(const Element& x) const {
    const auto& a = x.algebra();
    const auto fp = rho_plus_z(x);
    const auto fm = rho_minus_z(x);
    const auto th = theta(x);
    Element out = Element::zero(a);
    for (std::size_t i = 0; i < a.blocks(); ++i) {
      const auto n = a.dim(i);
      const double c = scalings.c_plus.re(i);
      const Matrix cp = p_plus.block(i) * c;
      const cplx g = fm[i] + (1.0 - q_minus.re(i)) * th[i];
      out.block(i) = cp * fp[i] + (Matrix::identity(n) - cp) * g;
    }
    return out;
  }
};

inline TransportMap build_transport_map(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  const auto pre = check_hermitian_reachable(w, r, tol);
  if (pre.verdict != Verdict::yes) throw Error("transport condition fails: " + pre.explanation);
  const auto& alg = w.algebra();
  const auto jw = jordan_decompose(w, tol);
  const auto jr = jordan_decompose(r, tol);

  TransportMap t;
  t.scalings = derive_central_scalings(w, r, tol);
  t.p_plus = support_projection(jw.positive_part, tol);
  const auto dp = central_decompose(jr.positive_part, tol);
  const auto dm = central_decompose(jr.negative_part, tol);
  t.rho_plus_z = dp.module_map;
  t.rho_minus_z = dm.module_map;
  t.q_minus = dm.unit_image;
  t.theta = CenterValuedMap::block_trace(alg);

  std::vector<Matrix> choi;
  for (std::size_t i = 0; i < alg.blocks(); ++i) {
    choi.push_back(choi_from_block_action(alg.dim(i), [&](const Matrix& e) {
      return t.apply(Element::on_block(alg, i, e)).block(i);
    }));
  }
  t.choi = ModuleMapChoi(alg, std::move(choi));
  t.kraus = kraus_from_choi(t.choi, tol);
  return t;
}

struct MaximalMixedness {
  Decision decision;
  IdealLattice quotient_lattice;
  std::vector<std::size_t> quotient_blocks;  // blocks of A/K (0-based, in A)
};

// Every state on ⊕ M_{n_i} is maximally mixed: the strong radical is zero
// and states with equal center restriction reach each other. When K is
// given, the check runs on A/K after confirming ω(K) = 0.
inline MaximalMixedness is_maximally_mixed(const Functional& w, const std::optional<Ideal>& k = std::nullopt,
                                           const Tolerances& tol = {}) {
  if (!w.is_state(tol.eig)) throw Error("is_maximally_mixed: input must be a state");
  const auto& alg = w.algebra();
  MaximalMixedness mm;
  std::vector<int> dims;
  std::vector<Matrix> dens;
  if (k) {
    require_same(alg, k->algebra());
    const double on_k = ideal_norm(w, *k);
    if (on_k > tol.dec * 10.0) throw Error("is_maximally_mixed: state does not vanish on K (mass " + std::to_string(on_k) + ")");
  }
  for (std::size_t i = 0; i < alg.blocks(); ++i) {
    if (k && k->contains_block(i)) continue;
    mm.quotient_blocks.push_back(i);
    dims.push_back(static_cast<int>(alg.dim(i)));
    dens.push_back(w.density(i));
  }
  if (dims.empty()) throw Error("is_maximally_mixed: quotient by K is the zero algebra");
  const auto qalg = AlgebraSpec::validate(dims);
  const Functional qw(qalg, std::move(dens));
  // ideal enumeration is bounded; past the cap the radical is known to be zero
  if (qalg.blocks() <= kIdealEnumerationCap) {
    mm.quotient_lattice = enumerate_ideals(qalg);
  } else {
    mm.quotient_lattice.strong_radical = Ideal::zero(qalg);
  }
  const double on_radical = ideal_norm(qw, mm.quotient_lattice.strong_radical);

  // mixing direction check: the tracial state with the same center
  // restriction is reachable from ω, and ω must be reachable back from it
  const auto tr = Functional::tracial(qalg, restrict_to_center(qw).real_values());
  const auto back = check_state_reachable(tr, qw, tol);
  const auto fwd = check_state_reachable(qw, tr, tol);
  double violation = on_radical;
  if (back.verdict != Verdict::yes || fwd.verdict != Verdict::yes) violation = std::max(violation, -back.margin);

  mm.decision = detail::make_decision(violation, tol.dec, "strong radical criterion: omega(J_A) = 0, with J_A = 0");
  mm.decision.explanation =
      std::string(k ? "checked on the quotient by K = " + k->to_string() + "; " : "") +
      "strong radical (intersection of the " + std::to_string(qalg.blocks()) +
      " maximal ideals) is the zero ideal; the primitive spectrum of a finite direct sum of matrix algebras is "
      "discrete (Hausdorff), so every state is maximally mixed; the tracial state with the same center "
      "restriction is reachable in both directions";
  return mm;
}

}  // namespace vnmix

#endif  // VNMIX_REACHABILITY_HPP
