#ifndef VNMIX_ORACLE_HPP
#define VNMIX_ORACLE_HPP

// Brute-force validators for the closed-form decision procedures, plus the
// seeded random instance generators used by tests and the selftest.
//
// The membership oracle searches directly for a unital completely positive
// block-preserving map φ with ω∘φ = ρ. Its Choi matrix on block i is an
// n_i² × n_i² PSD variable C_i constrained by
//   tr(C_i (h ⊗ 1)) = tr h              (φ(1) = 1, h hermitian)
//   tr(C_i (D_i^ωᵀ ⊗ x)) = tr(D_i^ρ x)  (ω∘φ = ρ, x hermitian)
// so the search splits into one feasibility problem per block.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vnmix/algebra.hpp"
#include "vnmix/channels.hpp"
#include "vnmix/functionals.hpp"
#include "vnmix/numerics/dykstra.hpp"
#include "vnmix/numerics/eigh.hpp"
#include "vnmix/reachability.hpp"

namespace vnmix::oracle {

inline constexpr std::size_t kMaxBlocks = 3;
inline constexpr std::size_t kMaxBlockDim = 4;

inline void check_caps(const AlgebraSpec& a) {
  if (a.blocks() > kMaxBlocks) throw Error("oracle: at most 3 blocks supported, got " + std::to_string(a.blocks()));
  for (auto n : a.block_dims())
    if (n > kMaxBlockDim) throw Error("oracle: block dimension above 4 (" + std::to_string(n) + ")");
}

// ---------------------------------------------------------------------------
// random instances

inline Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  Matrix g = detail::gaussian_matrix(n, n, rng);
  // Gram-Schmidt on columns
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cplx proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(g(i, k)) * g(i, j);
      for (std::size_t i = 0; i < n; ++i) g(i, j) -= proj * g(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(g(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= nrm;
  }
  return g;
}

// u diag(values) u*
inline Matrix with_spectrum(const std::vector<double>& values, const Matrix& u) {
  Matrix d(values.size(), values.size());
  for (std::size_t k = 0; k < values.size(); ++k) d(k, k) = values[k];
  return (u * d * u.adjoint()).hermitian_part();
}

struct StateOptions {
  std::optional<std::vector<double>> center;      // prescribed block traces, summing to 1
  std::optional<std::vector<std::size_t>> ranks;  // prescribed density ranks (0 allowed)
};

inline Functional random_state(const AlgebraSpec& a, std::uint64_t seed, const StateOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  const std::size_t b = a.blocks();
  std::vector<double> center(b);
  if (opt.center) {
    if (opt.center->size() != b) throw Error("random_state: center has wrong length");
    double s = 0.0;
    for (double c : *opt.center) {
      if (c < 0.0) throw Error("random_state: negative center weight");
      s += c;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error("random_state: center weights must sum to 1");
    center = *opt.center;
  } else {
    double s = 0.0;
    for (auto& c : center) s += (c = unif(rng));
    for (auto& c : center) c /= s;
  }
  if (opt.ranks && opt.ranks->size() != b) throw Error("random_state: ranks has wrong length");

  std::vector<Matrix> dens;
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t n = a.dim(i);
    const std::size_t r = opt.ranks ? (*opt.ranks)[i] : n;
    if (r > n) throw Error("random_state: rank exceeds block dimension");
    if (r == 0 && center[i] > 0.0) throw Error("random_state: rank 0 on a block with positive weight");
    if (center[i] == 0.0 || r == 0) {
      dens.emplace_back(n, n);
      continue;
    }
    const Matrix g = detail::gaussian_matrix(n, r, rng);
    Matrix d = (g * g.adjoint()).hermitian_part();
    d *= cplx(center[i] / d.trace().real());
    dens.push_back(std::move(d));
  }
  return {a, std::move(dens)};
}

struct HermitianOptions {
  std::optional<std::vector<double>> traces;
  std::optional<std::vector<double>> trace_norms;
};

// Density with given trace t and trace norm s: positive mass (s+t)/2 and
// negative mass (s-t)/2 on complementary eigenspaces of a random unitary.
inline Matrix random_hermitian_block(std::size_t n, double t, double s, std::mt19937_64& rng) {
  if (s < std::abs(t) - 1e-15) throw Error("random_hermitian: trace norm below |trace|");
  s = std::max(s, std::abs(t));
  const double pos = 0.5 * (s + t);
  const double neg = 0.5 * (s - t);
  if (n == 1) {
    if (pos > 1e-15 && neg > 1e-15) throw Error("random_hermitian: a 1-dimensional block needs trace norm = |trace|");
    return Matrix::diag({t});
  }
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::size_t kpos = n;
  if (neg > 0.0 && pos > 0.0)
    kpos = 1 + std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
  else if (neg > 0.0)
    kpos = 0;
  std::vector<double> vals(n, 0.0);
  double sp = 0.0, sn = 0.0;
  for (std::size_t k = 0; k < n; ++k) (k < kpos ? sp : sn) += (vals[k] = unif(rng));
  for (std::size_t k = 0; k < n; ++k) vals[k] = k < kpos ? vals[k] * pos / sp : -vals[k] * neg / sn;
  return with_spectrum(vals, random_unitary(n, rng));
}

inline Functional random_hermitian(const AlgebraSpec& a, std::uint64_t seed, const HermitianOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const std::size_t b = a.blocks();
  if (opt.traces && opt.traces->size() != b) throw Error("random_hermitian: traces has wrong length");
  if (opt.trace_norms && opt.trace_norms->size() != b) throw Error("random_hermitian: trace_norms has wrong length");
  std::vector<Matrix> dens;
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t n = a.dim(i);
    double t = opt.traces ? (*opt.traces)[i] : 0.0;
    double s = opt.trace_norms ? (*opt.trace_norms)[i] : 0.0;
    if (opt.trace_norms && s < 0.0) throw Error("random_hermitian: negative trace norm");
    if (opt.traces && opt.trace_norms && s < std::abs(t) - 1e-15)
      throw Error("random_hermitian: prescribed trace norm " + std::to_string(s) + " is below |trace| " +
                  std::to_string(std::abs(t)) + " on block " + std::to_string(i + 1));
    if (!opt.traces && !opt.trace_norms) {
      t = 0.5 * unif(rng);
      s = n == 1 ? std::abs(t) : std::abs(t) + 0.5 * (1.0 + unif(rng));
    } else if (!opt.trace_norms) {
      s = n == 1 ? std::abs(t) : std::abs(t) + 0.5 * (1.0 + unif(rng));
    } else if (!opt.traces) {
      t = n == 1 ? (unif(rng) < 0.0 ? -s : s) : s * unif(rng);
    }
    dens.push_back(random_hermitian_block(n, t, s, rng));
  }
  return {a, std::move(dens)};
}

inline AlgebraSpec random_algebra(std::mt19937_64& rng, std::size_t max_blocks = kMaxBlocks,
                                  std::size_t max_dim = kMaxBlockDim) {
  const auto b = std::uniform_int_distribution<std::size_t>(1, max_blocks)(rng);
  std::vector<int> dims;
  for (std::size_t i = 0; i < b; ++i) dims.push_back(static_cast<int>(std::uniform_int_distribution<std::size_t>(1, max_dim)(rng)));
  return AlgebraSpec::validate(dims);
}

inline Element random_element(const AlgebraSpec& a, std::mt19937_64& rng) {
  std::vector<Matrix> b;
  for (auto n : a.block_dims()) b.push_back(detail::gaussian_matrix(n, n, rng));
  return {a, std::move(b)};
}

// ρ with the block traces of ω. With reachable = true the block trace norms
// are drawn in [|t_i|, ||D_i^ω||_1]; otherwise one block with n_i >= 2 (if
// any) gets a trace norm strictly above ||D_i^ω||_1.
inline Functional random_companion(const Functional& w, std::uint64_t seed, bool reachable = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto& a = w.algebra();
  std::vector<double> t, s;
  std::vector<std::size_t> wide;
  for (std::size_t i = 0; i < a.blocks(); ++i) {
    const double ti = w.density(i).trace().real();
    const double ni = numerics::trace_norm(w.density(i));
    t.push_back(ti);
    s.push_back(a.dim(i) == 1 ? std::abs(ti) : std::abs(ti) + unif(rng) * std::max(0.0, ni - std::abs(ti)));
    if (a.dim(i) >= 2) wide.push_back(i);
  }
  if (!reachable && !wide.empty()) {
    const auto i = wide[std::uniform_int_distribution<std::size_t>(0, wide.size() - 1)(rng)];
    s[i] = numerics::trace_norm(w.density(i)) + 0.05 + 0.5 * unif(rng);
  }
  return random_hermitian(a, rng(), {t, s});
}

// ---------------------------------------------------------------------------
// Choi membership

struct OracleReport {
  numerics::Feasibility status = numerics::Feasibility::indeterminate;
  double residual = 0.0;
  int iterations = 0;
  std::optional<ModuleMapChoi> choi;
  std::string detail;

  Verdict verdict() const {
    switch (status) {
      case numerics::Feasibility::feasible: return Verdict::yes;
      case numerics::Feasibility::infeasible: return Verdict::no;
      default: return Verdict::indeterminate;
    }
  }
};

inline numerics::FeasibilityProblem choi_block_problem(const Matrix& dw, const Matrix& dr, const Tolerances& tol) {
  const std::size_t n = dw.rows();
  numerics::FeasibilityProblem p;
  p.dimension = n * n;
  p.options.tolerance = tol.feas;
  const Matrix id = Matrix::identity(n);
  const Matrix dwt = dw.transpose();
  for (const auto& h : hermitian_basis(n)) p.constraints.push_back({kron(h, id), h.trace().real()});
  for (const auto& x : hermitian_basis(n)) p.constraints.push_back({kron(dwt, x), trace_product(dr, x).real()});
  return p;
}

// Exists a unital CP block-preserving φ with ω∘φ = ρ? With hermitian = false
// both inputs must be states.
inline OracleReport choi_membership_oracle(const Functional& w, const Functional& r, bool hermitian = false,
                                           const Tolerances& tol = {}) {
  require_same(w.algebra(), r.algebra());
  check_caps(w.algebra());
  if (hermitian) {
    if (!w.is_hermitian(tol.eig) || !r.is_hermitian(tol.eig))
      throw Error("choi_membership_oracle: functionals must be hermitian");
  } else if (!w.is_state(tol.eig) || !r.is_state(tol.eig)) {
    throw Error("choi_membership_oracle: inputs must be states (pass hermitian = true otherwise)");
  }

  OracleReport rep;
  std::vector<Matrix> blocks;
  rep.status = numerics::Feasibility::feasible;
  for (std::size_t i = 0; i < w.algebra().blocks(); ++i) {
    const auto res = numerics::solve_feasibility(choi_block_problem(w.density(i), r.density(i), tol));
    rep.iterations += res.iterations;
    rep.residual = std::max(rep.residual, res.residual);
    if (res.status == numerics::Feasibility::infeasible) {
      rep.status = res.status;
      rep.detail = "block " + std::to_string(i + 1) + ": " + res.detail;
      return rep;
    }
    if (res.status == numerics::Feasibility::indeterminate) {
      rep.status = res.status;
      rep.detail = "block " + std::to_string(i + 1) + ": " + res.detail;
      continue;
    }
    blocks.push_back(*res.point);
  }
  if (rep.status == numerics::Feasibility::feasible) {
    rep.choi = ModuleMapChoi(w.algebra(), std::move(blocks));
    rep.detail = "found a unital completely positive map";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// ideal norm by search over contractions supported in J

inline double variational_ideal_norm(const Functional& w, const Ideal& j, std::uint64_t seed = 0,
                                     int random_trials = 16) {
  require_same(w.algebra(), j.algebra());
  const auto& a = w.algebra();
  std::mt19937_64 rng(seed);
  auto restrict = [&](Element x) {
    for (std::size_t i = 0; i < a.blocks(); ++i)
      if (!j.contains_block(i)) x.block(i) = Matrix(a.dim(i), a.dim(i));
    return x;
  };
  double best = 0.0;
  auto consider = [&](const Element& x) { best = std::max(best, std::abs(evaluate(w, restrict(x)))); };

  // spectral sign of each density
  std::vector<Matrix> sgn;
  for (std::size_t i = 0; i < a.blocks(); ++i)
    sgn.push_back(numerics::spectral_apply(w.density(i).hermitian_part(),
                                           [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }));
  consider(Element(a, sgn));
  consider(Element::identity(a));
  for (int t = 0; t < random_trials; ++t) {
    std::vector<Matrix> u;
    for (auto n : a.block_dims()) u.push_back(random_unitary(n, rng));
    consider(Element(a, std::move(u)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// split witnesses: positive ρ₁, ρ₂ with ρ₁ - ρ₂ = ρ and per-block masses of ω₊, ω₋

struct SplitWitnessReport {
  numerics::Feasibility status = numerics::Feasibility::indeterminate;
  double residual = 0.0;
  int iterations = 0;
  std::optional<Functional> rho1;
  std::optional<Functional> rho2;
  std::string detail;

  Verdict verdict() const {
    switch (status) {
      case numerics::Feasibility::feasible: return Verdict::yes;
      case numerics::Feasibility::infeasible: return Verdict::no;
      default: return Verdict::indeterminate;
    }
  }
};

inline SplitWitnessReport split_witness_oracle(const Functional& w, const Functional& r, const Tolerances& tol = {}) {
  require_same(w.algebra(), r.algebra());
  if (!w.is_hermitian(tol.eig) || !r.is_hermitian(tol.eig))
    throw Error("split_witness_oracle: functionals must be hermitian");
  const auto& a = w.algebra();
  const auto jw = jordan_decompose(w, tol);
  SplitWitnessReport rep;
  rep.status = numerics::Feasibility::feasible;
  std::vector<Matrix> r1, r2;
  for (std::size_t i = 0; i < a.blocks(); ++i) {
    const std::size_t n = a.dim(i);
    auto embed = [n](const Matrix& top, const Matrix& bottom) {
      Matrix m(2 * n, 2 * n);
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          m(p, q) = top(p, q);
          m(n + p, n + q) = bottom(p, q);
        }
      return m;
    };
    numerics::FeasibilityProblem prob;
    prob.dimension = 2 * n;
    prob.options.tolerance = tol.feas;
    for (const auto& h : hermitian_basis(n))
      prob.constraints.push_back({embed(h, h * cplx(-1.0)), trace_product(r.density(i), h).real()});
    const Matrix id = Matrix::identity(n), zero(n, n);
    prob.constraints.push_back({embed(id, zero), jw.positive_part.density(i).trace().real()});
    prob.constraints.push_back({embed(zero, id), jw.negative_part.density(i).trace().real()});
    const auto res = numerics::solve_feasibility(prob);
    rep.iterations += res.iterations;
    rep.residual = std::max(rep.residual, res.residual);
    if (res.status != numerics::Feasibility::feasible) {
      rep.status = res.status;
      rep.detail = "block " + std::to_string(i + 1) + ": " + res.detail;
      if (res.status == numerics::Feasibility::infeasible) return rep;
      continue;
    }
    Matrix x1(n, n), x2(n, n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        x1(p, q) = (*res.point)(p, q);
        x2(p, q) = (*res.point)(n + p, n + q);
      }
    r1.push_back(std::move(x1));
    r2.push_back(std::move(x2));
  }
  if (rep.status == numerics::Feasibility::feasible) {
    rep.rho1 = Functional(a, std::move(r1));
    rep.rho2 = Functional(a, std::move(r2));
    rep.detail = "found positive witnesses";
  }
  return rep;
}

}  // namespace vnmix::oracle

#endif  // VNMIX_ORACLE_HPP
