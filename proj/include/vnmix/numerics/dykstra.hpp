#ifndef VNMIX_NUMERICS_DYKSTRA_HPP
#define VNMIX_NUMERICS_DYKSTRA_HPP

// PSD feasibility by alternating projections (Dykstra or Douglas-Rachford):
//
//   find X = X* ⪰ 0 with tr(A_k X) = b_k for all k.
//
// The affine projection uses the Gram matrix G_kl = tr(A_k A_l), factored
// once through its spectral pseudo-inverse. A right-hand side outside the
// range of G means the affine system itself is inconsistent, which is
// reported as an algebraic infeasibility before iterating.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vnmix/matrix.hpp"
#include "vnmix/numerics/eigh.hpp"

namespace vnmix::numerics {

struct AffineConstraint {
  Matrix op;      // hermitian
  double target;  // tr(op X) = target
};

enum class Method { douglas_rachford, dykstra };

struct FeasibilityOptions {
  Method method = Method::douglas_rachford;
  double tolerance = 1e-7;   // accept: residual and -min eigenvalue below this
  double target = 1e-12;     // keep iterating until the residual reaches this
  double plateau = 1e-5;     // stagnating above this → infeasible
  int max_iter = 20000;
  int plateau_window = 500;
  // affine inconsistency threshold relative to max(1, |b|)
  double consistency_tol = 1e-9;
};

struct FeasibilityProblem {
  std::size_t dimension = 0;
  std::vector<AffineConstraint> constraints;
  FeasibilityOptions options;

  void validate() const {
    if (constraints.empty()) throw Error("feasibility problem without constraints");
    for (const auto& c : constraints) {
      if (c.op.rows() != dimension || c.op.cols() != dimension)
        throw Error("constraint operator has wrong dimension");
      if (c.op.hermiticity_residual() > 1e-12 * std::max(1.0, c.op.max_abs()))
        throw Error("constraint operator is not hermitian");
    }
  }
};

enum class Feasibility { feasible, infeasible, indeterminate };

inline const char* to_string(Feasibility f) {
  switch (f) {
    case Feasibility::feasible: return "feasible";
    case Feasibility::infeasible: return "infeasible";
    case Feasibility::indeterminate: return "indeterminate";
  }
  return "?";
}

struct FeasibilityResult {
  Feasibility status = Feasibility::indeterminate;
  std::optional<Matrix> point;  // set when feasible; exactly PSD
  double residual = 0.0;        // max |tr(A_k X) - b_k| at the last PSD iterate
  double min_eigenvalue = 0.0;
  int iterations = 0;
  bool algebraic = false;       // infeasibility detected from the affine system alone
  std::string detail;
};

class AffineProjector {
 public:
  explicit AffineProjector(const FeasibilityProblem& p) : ops_(), b_() {
    const std::size_t m = p.constraints.size();
    ops_.reserve(m);
    b_.reserve(m);
    for (const auto& c : p.constraints) {
      ops_.push_back(c.op);
      b_.push_back(c.target);
    }
    Matrix gram(m, m);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t l = k; l < m; ++l) {
        const double g = inner(ops_[k], ops_[l]).real();
        gram(k, l) = g;
        gram(l, k) = g;
      }
    gram_pinv_ = pinv_hermitian(gram, 1e-12);
    // b must lie in range(G) = range of X ↦ (tr(A_k X))_k
    std::vector<cplx> bc(b_.begin(), b_.end());
    const auto proj = matvec(gram * gram_pinv_, bc);
    double bnorm = 1.0;
    for (double v : b_) bnorm = std::max(bnorm, std::abs(v));
    inconsistency_ = 0.0;
    for (std::size_t k = 0; k < m; ++k) inconsistency_ = std::max(inconsistency_, std::abs(proj[k] - bc[k]));
    inconsistency_ /= bnorm;
  }

  double inconsistency() const { return inconsistency_; }

  double residual(const Matrix& x) const {
    double r = 0.0;
    for (std::size_t k = 0; k < ops_.size(); ++k)
      r = std::max(r, std::abs(trace_product(ops_[k], x).real() - b_[k]));
    return r;
  }

  Matrix project(const Matrix& x) const {
    const std::size_t m = ops_.size();
    std::vector<cplx> defect(m);
    for (std::size_t k = 0; k < m; ++k) defect[k] = trace_product(ops_[k], x).real() - b_[k];
    const auto coef = matvec(gram_pinv_, defect);
    Matrix y = x;
    for (std::size_t k = 0; k < m; ++k) {
      const double c = coef[k].real();
      if (c == 0.0) continue;
      auto yd = y.data();
      auto od = ops_[k].data();
      for (std::size_t e = 0; e < yd.size(); ++e) yd[e] -= c * od[e];
    }
    return y.hermitian_part();
  }

 private:
  std::vector<Matrix> ops_;
  std::vector<double> b_;
  Matrix gram_pinv_;
  double inconsistency_ = 0.0;
};

namespace detail {

// Shared driver: `step` advances the method's state and returns the current
// PSD iterate. Stops at the target residual, on a stalled checkpoint above
// the plateau threshold, or at max_iter.
template <class Step>
FeasibilityResult run_feasibility(const FeasibilityProblem& problem, const AffineProjector& affine, Step step) {
  const auto& opt = problem.options;
  FeasibilityResult res;
  double last_checkpoint = INFINITY;
  double residual = INFINITY;
  bool stalled = false;
  Matrix x;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    x = step();
    residual = affine.residual(x);
    if (residual <= opt.target) {
      ++it;
      break;
    }
    if ((it + 1) % opt.plateau_window == 0) {
      if (residual > opt.plateau && last_checkpoint - residual < 1e-3 * residual) {
        stalled = true;
        ++it;
        break;
      }
      last_checkpoint = residual;
    }
  }

  res.iterations = it;
  res.residual = residual;
  res.min_eigenvalue = min_eigenvalue(x);
  if (residual <= opt.tolerance && res.min_eigenvalue >= -opt.tolerance) {
    res.status = Feasibility::feasible;
    res.point = x;
    res.detail = "converged";
  } else if (stalled) {
    res.status = Feasibility::infeasible;
    res.detail = "residual plateaued above threshold";
  } else if (residual > opt.plateau) {
    res.status = Feasibility::indeterminate;
    res.detail = "iteration limit reached with residual above plateau threshold";
  } else {
    res.status = Feasibility::indeterminate;
    res.detail = "residual between tolerance and plateau threshold";
  }
  return res;
}

inline std::optional<FeasibilityResult> algebraic_check(const FeasibilityProblem& problem,
                                                        const AffineProjector& affine) {
  if (affine.inconsistency() <= problem.options.consistency_tol) return std::nullopt;
  FeasibilityResult res;
  res.status = Feasibility::infeasible;
  res.algebraic = true;
  res.residual = affine.inconsistency();
  res.detail = "affine constraints are inconsistent";
  return res;
}

}  // namespace detail

// Dykstra's alternating projections, started at 0.
inline FeasibilityResult dykstra_feasibility(const FeasibilityProblem& problem) {
  problem.validate();
  AffineProjector affine(problem);
  if (auto bad = detail::algebraic_check(problem, affine)) return *bad;
  const std::size_t n = problem.dimension;
  Matrix x(n, n), p_aff(n, n), q_psd(n, n);
  return detail::run_feasibility(problem, affine, [&] {
    Matrix y = affine.project(x + p_aff);
    p_aff = x + p_aff - y;
    Matrix x_new = psd_project(y + q_psd);
    q_psd = y + q_psd - x_new;
    x = std::move(x_new);
    return x;
  });
}

// Douglas-Rachford splitting on the same pair of sets, reporting the PSD
// shadow iterate P_psd(z). Converges linearly on thin feasible sets where
// Dykstra (which targets the nearest feasible point, usually on the cone
// boundary) stalls.
inline FeasibilityResult douglas_rachford_feasibility(const FeasibilityProblem& problem) {
  problem.validate();
  AffineProjector affine(problem);
  if (auto bad = detail::algebraic_check(problem, affine)) return *bad;
  const std::size_t n = problem.dimension;
  Matrix z(n, n), shadow(n, n);
  return detail::run_feasibility(problem, affine, [&] {
    z += affine.project(shadow * cplx(2.0) - z) - shadow;
    shadow = psd_project(z);
    return shadow;
  });
}

inline FeasibilityResult solve_feasibility(const FeasibilityProblem& problem) {
  return problem.options.method == Method::dykstra ? dykstra_feasibility(problem)
                                                   : douglas_rachford_feasibility(problem);
}

}  // namespace vnmix::numerics

#endif  // VNMIX_NUMERICS_DYKSTRA_HPP
