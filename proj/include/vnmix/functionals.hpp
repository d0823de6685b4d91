#ifndef VNMIX_FUNCTIONALS_HPP
#define VNMIX_FUNCTIONALS_HPP

// Hermitian functionals on A = ⊕ M_{n_i}, stored as one density matrix per
// block: ω(x) = Σ_i tr(D_i x_i).

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vnmix/algebra.hpp"
#include "vnmix/numerics/eigh.hpp"

namespace vnmix {

class Functional {
 public:
  Functional() = default;
  Functional(AlgebraSpec alg, std::vector<Matrix> densities)
      : alg_(std::move(alg)), densities_(std::move(densities)) {
    if (densities_.size() != alg_.blocks()) throw Error("functional has wrong number of densities");
    for (std::size_t i = 0; i < densities_.size(); ++i)
      if (densities_[i].rows() != alg_.dim(i) || densities_[i].cols() != alg_.dim(i))
        throw Error("density " + std::to_string(i) + " has wrong shape");
  }

  static Functional zero(const AlgebraSpec& a) {
    std::vector<Matrix> d;
    for (auto n : a.block_dims()) d.emplace_back(n, n);
    return {a, std::move(d)};
  }
  // Σ_i w_i · tr_i(x)/n_i
  static Functional tracial(const AlgebraSpec& a, const std::vector<double>& weights) {
    if (weights.size() != a.blocks()) throw Error("tracial weights have wrong length");
    std::vector<Matrix> d;
    for (std::size_t i = 0; i < a.blocks(); ++i)
      d.push_back(Matrix::identity(a.dim(i)) * (weights[i] / static_cast<double>(a.dim(i))));
    return {a, std::move(d)};
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::vector<Matrix>& densities() const { return densities_; }
  const Matrix& density(std::size_t i) const { return densities_.at(i); }

  bool is_hermitian(double tol) const {
    for (const auto& d : densities_)
      if (d.hermiticity_residual() > tol * std::max(1.0, d.max_abs())) return false;
    return true;
  }
  bool is_positive(double tol) const {
    if (!is_hermitian(tol)) return false;
    for (const auto& d : densities_)
      if (!numerics::is_psd(d, tol)) return false;
    return true;
  }
  bool is_state(double tol) const {
    return is_positive(tol) && std::abs(total_mass() - 1.0) <= tol * 10.0 + 1e-12;
  }

  // ω(1)
  double total_mass() const {
    double s = 0.0;
    for (const auto& d : densities_) s += d.trace().real();
    return s;
  }

  // ||ω|| = Σ_i ||D_i||_1
  double norm() const {
    double s = 0.0;
    for (const auto& d : densities_) s += numerics::trace_norm(d);
    return s;
  }

  double distance(const Functional& o) const {
    require_same(alg_, o.alg_);
    double s = 0.0;
    for (std::size_t i = 0; i < densities_.size(); ++i)
      s += numerics::trace_norm((densities_[i] - o.densities_[i]).hermitian_part());
    return s;
  }
  double max_entry_difference(const Functional& o) const {
    require_same(alg_, o.alg_);
    double s = 0.0;
    for (std::size_t i = 0; i < densities_.size(); ++i) s = std::max(s, (densities_[i] - o.densities_[i]).max_abs());
    return s;
  }

  Functional& operator+=(const Functional& o) {
    require_same(alg_, o.alg_);
    for (std::size_t i = 0; i < densities_.size(); ++i) densities_[i] += o.densities_[i];
    return *this;
  }
  Functional& operator-=(const Functional& o) {
    require_same(alg_, o.alg_);
    for (std::size_t i = 0; i < densities_.size(); ++i) densities_[i] -= o.densities_[i];
    return *this;
  }
  Functional& operator*=(double s) {
    for (auto& d : densities_) d *= s;
    return *this;
  }
  friend Functional operator+(Functional a, const Functional& b) { return a += b; }
  friend Functional operator-(Functional a, const Functional& b) { return a -= b; }
  friend Functional operator*(Functional a, double s) { return a *= s; }
  friend Functional operator*(double s, Functional a) { return a *= s; }

  // c·ω : x ↦ ω(c x)
  Functional scaled(const CenterElement& c) const {
    require_same(alg_, c.algebra());
    Functional r = *this;
    for (std::size_t i = 0; i < densities_.size(); ++i) r.densities_[i] *= c[i];
    return r;
  }

 private:
  AlgebraSpec alg_;
  std::vector<Matrix> densities_;
};

inline cplx evaluate(const Functional& w, const Element& x) {
  require_same(w.algebra(), x.algebra());
  cplx s = 0.0;
  for (std::size_t i = 0; i < w.densities().size(); ++i) s += trace_product(w.density(i), x.block(i));
  return s;
}

// μ_i = tr(D_i)
inline CenterElement restrict_to_center(const Functional& w) {
  std::vector<double> v;
  for (const auto& d : w.densities()) v.push_back(d.trace().real());
  return CenterElement::real(w.algebra(), v);
}

struct JordanPair {
  Functional positive_part;
  Functional negative_part;

  double norm() const { return positive_part.total_mass() + negative_part.total_mass(); }
};

inline JordanPair jordan_decompose(const Functional& w, const Tolerances& tol = {}) {
  if (!w.is_hermitian(tol.eig)) throw Error("jordan decomposition: functional is not hermitian");
  std::vector<Matrix> pos, neg;
  for (const auto& d : w.densities()) {
    const auto es = numerics::eigh_hermitian(d);
    pos.push_back(numerics::spectral_apply(es, [](double x) { return x > 0.0 ? x : 0.0; }));
    neg.push_back(numerics::spectral_apply(es, [](double x) { return x < 0.0 ? -x : 0.0; }));
  }
  return {Functional(w.algebra(), std::move(pos)), Functional(w.algebra(), std::move(neg))};
}

// Per block, projection onto eigenvectors with eigenvalue > eps·||D_i||.
inline Element support_projection(const Functional& w, const Tolerances& tol = {}) {
  if (!w.is_positive(tol.eig)) throw Error("support projection: functional is not positive");
  std::vector<Matrix> b;
  for (const auto& d : w.densities()) b.push_back(numerics::range_projection(d, tol.eig));
  return {w.algebra(), std::move(b)};
}

// ||ω|_J|| = Σ_{i∈S} ||D_i||_1
inline double ideal_norm(const Functional& w, const Ideal& j) {
  require_same(w.algebra(), j.algebra());
  double s = 0.0;
  for (std::size_t i = 0; i < w.densities().size(); ++i)
    if (j.contains_block(i)) s += numerics::trace_norm(w.density(i));
  return s;
}

// ||cω|| = Σ_i c_i ||D_i||_1 for central c ≥ 0
inline double weighted_norm(const Functional& w, const CenterElement& c, const Tolerances& tol = {}) {
  require_same(w.algebra(), c.algebra());
  if (!c.is_positive(tol.eig)) throw Error("weighted norm: center weight is not positive");
  double s = 0.0;
  for (std::size_t i = 0; i < w.densities().size(); ++i) s += c.re(i) * numerics::trace_norm(w.density(i));
  return s;
}

// Center-valued module map x ↦ (f_i(x_i))_i with f_i(x) = tr(S_i x); S_i = 0
// on blocks where the map vanishes. Positive iff every S_i ⪰ 0.
class CenterValuedMap {
 public:
  CenterValuedMap() = default;
  CenterValuedMap(AlgebraSpec alg, std::vector<Matrix> kernels) : alg_(std::move(alg)), kernels_(std::move(kernels)) {
    if (kernels_.size() != alg_.blocks()) throw Error("center-valued map has wrong number of blocks");
  }

  // normalized block trace x ↦ (tr(x_i)/n_i)_i
  static CenterValuedMap block_trace(const AlgebraSpec& a) {
    std::vector<Matrix> k;
    for (auto n : a.block_dims()) k.push_back(Matrix::identity(n) * (1.0 / static_cast<double>(n)));
    return {a, std::move(k)};
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const Matrix& kernel(std::size_t i) const { return kernels_.at(i); }

  CenterElement operator()(const Element& x) const {
    require_same(alg_, x.algebra());
    std::vector<cplx> v;
    for (std::size_t i = 0; i < kernels_.size(); ++i) v.push_back(trace_product(kernels_[i], x.block(i)));
    return {alg_, std::move(v)};
  }

  // value at 1, per block
  CenterElement unit_image() const { return (*this)(Element::identity(alg_)); }

 private:
  AlgebraSpec alg_;
  std::vector<Matrix> kernels_;
};

struct CentralDecomposition {
  CenterElement center_restriction;  // μ = ω|Z
  CenterValuedMap module_map;        // ω = μ ∘ module_map
  CenterElement unit_image;          // module_map(1): support projection of μ

  // μ∘module_map as a functional
  cplx reconstruct(const Element& x) const {
    const auto v = module_map(x);
    cplx s = 0.0;
    for (std::size_t i = 0; i < v.values().size(); ++i) s += center_restriction[i] * v[i];
    return s;
  }
};

// Blocks with μ_i <= eps·max(1, ||ω||) are treated as massless.
inline CentralDecomposition central_decompose(const Functional& w, const Tolerances& tol = {}) {
  if (!w.is_positive(tol.eig)) throw Error("central decomposition: functional is not positive");
  const auto mu = restrict_to_center(w);
  const double cut = tol.eig * std::max(1.0, w.total_mass());
  std::vector<Matrix> kernels;
  std::vector<double> unit;
  for (std::size_t i = 0; i < w.densities().size(); ++i) {
    const double m = mu.re(i);
    if (m > cut) {
      kernels.push_back(w.density(i) * (1.0 / m));
      unit.push_back(1.0);
    } else {
      kernels.emplace_back(w.algebra().dim(i), w.algebra().dim(i));
      unit.push_back(0.0);
    }
  }
  CentralDecomposition cd{mu, CenterValuedMap(w.algebra(), std::move(kernels)), CenterElement::real(w.algebra(), unit)};
  return cd;
}

// Projection in Z onto the blocks where the positive functional has mass.
inline CenterElement central_support(const Functional& w, const Tolerances& tol = {}) {
  return central_decompose(w, tol).unit_image;
}

}  // namespace vnmix

#endif  // VNMIX_FUNCTIONALS_HPP
