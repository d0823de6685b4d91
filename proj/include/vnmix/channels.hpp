#ifndef VNMIX_CHANNELS_HPP
#define VNMIX_CHANNELS_HPP

// Completely positive center-module maps on A = ⊕ M_{n_i}.
//
// Kraus form:  φ(x) = Σ_j a_j* x a_j  with block-diagonal a_j ∈ A.
// Choi form:   one n_i² × n_i² matrix per block,
//              C_i = Σ_j vec(a_{j,i}) vec(a_{j,i})*,
// with column-stacking vec (vec(a)[p + n q] = a_pq). In this convention
//
//   φ(x)_{ml} = Σ_{p,p'} x_{pp'} C_{(p' + n l), (p + n m)}
//
// and φ is unital iff tracing C over the fast index p gives the identity.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "vnmix/algebra.hpp"
#include "vnmix/functionals.hpp"
#include "vnmix/numerics/eigh.hpp"

namespace vnmix {

class KrausMap {
 public:
  KrausMap() = default;
  KrausMap(AlgebraSpec alg, std::vector<Element> kraus) : alg_(std::move(alg)), kraus_(std::move(kraus)) {
    for (const auto& a : kraus_) require_same(alg_, a.algebra());
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::vector<Element>& kraus() const { return kraus_; }
  std::size_t size() const { return kraus_.size(); }

  // Σ_j a_j* a_j
  Element gram() const {
    Element s = Element::zero(alg_);
    for (const auto& a : kraus_) s += a.adjoint() * a;
    return s;
  }
  double unitality_residual() const {
    // operator norm of Σ a*a - 1
    return (gram() - Element::identity(alg_)).norm();
  }
  bool is_unital(double tol = 1e-9) const { return unitality_residual() <= tol; }

 private:
  AlgebraSpec alg_;
  std::vector<Element> kraus_;
};

inline Element apply_kraus(const KrausMap& phi, const Element& x) {
  require_same(phi.algebra(), x.algebra());
  Element r = Element::zero(x.algebra());
  for (const auto& a : phi.kraus()) r += a.adjoint() * x * a;
  return r;
}

// ψ_♯(ω) = Σ_j a_j ω a_j*, i.e. D_i ↦ Σ_j a_{j,i} D_i a_{j,i}*
inline Functional predual_apply(const KrausMap& phi, const Functional& w) {
  require_same(phi.algebra(), w.algebra());
  std::vector<Matrix> d;
  for (std::size_t i = 0; i < w.densities().size(); ++i) {
    Matrix s(w.algebra().dim(i), w.algebra().dim(i));
    for (const auto& a : phi.kraus()) s += a.block(i) * w.density(i) * a.block(i).adjoint();
    d.push_back(std::move(s));
  }
  return {w.algebra(), std::move(d)};
}

class ModuleMapChoi {
 public:
  ModuleMapChoi() = default;
  ModuleMapChoi(AlgebraSpec alg, std::vector<Matrix> choi) : alg_(std::move(alg)), choi_(std::move(choi)) {
    if (choi_.size() != alg_.blocks()) throw Error("choi map has wrong number of blocks");
    for (std::size_t i = 0; i < choi_.size(); ++i) {
      const auto n2 = alg_.dim(i) * alg_.dim(i);
      if (choi_[i].rows() != n2 || choi_[i].cols() != n2)
        throw Error("choi block " + std::to_string(i) + " has wrong shape");
    }
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::vector<Matrix>& choi_blocks() const { return choi_; }
  const Matrix& choi_block(std::size_t i) const { return choi_.at(i); }

  double min_eigenvalue() const {
    double m = INFINITY;
    for (const auto& c : choi_) m = std::min(m, numerics::min_eigenvalue(c));
    return m;
  }
  bool is_completely_positive(double tol) const {
    for (const auto& c : choi_)
      if (c.hermiticity_residual() > tol * std::max(1.0, c.max_abs()) || !numerics::is_psd(c, tol)) return false;
    return true;
  }
  // max entry of (Tr_fast C_i - 1) over blocks
  double unitality_residual() const {
    double m = 0.0;
    for (std::size_t i = 0; i < choi_.size(); ++i) {
      const auto n = alg_.dim(i);
      m = std::max(m, (partial_trace_fast(choi_[i], n, n) - Matrix::identity(n)).max_abs());
    }
    return m;
  }
  bool is_unital(double tol = 1e-9) const { return unitality_residual() <= tol; }

  Element apply(const Element& x) const {
    require_same(alg_, x.algebra());
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < choi_.size(); ++i) {
      const auto n = alg_.dim(i);
      const Matrix& c = choi_[i];
      const Matrix& xi = x.block(i);
      Matrix r(n, n);
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t l = 0; l < n; ++l) {
          cplx s = 0.0;
          for (std::size_t p = 0; p < n; ++p)
            for (std::size_t pp = 0; pp < n; ++pp) s += xi(p, pp) * c(pp + n * l, p + n * m);
          r(m, l) = s;
        }
      out.push_back(std::move(r));
    }
    return {alg_, std::move(out)};
  }

  double max_difference(const ModuleMapChoi& o) const {
    require_same(alg_, o.alg_);
    double m = 0.0;
    for (std::size_t i = 0; i < choi_.size(); ++i) m = std::max(m, (choi_[i] - o.choi_[i]).max_abs());
    return m;
  }

 private:
  AlgebraSpec alg_;
  std::vector<Matrix> choi_;
};

// Choi matrix of an arbitrary block-preserving linear map, from its action
// on matrix units: C_{(p' + n l), (p + n m)} = φ(e_{pp'})_{ml}.
inline Matrix choi_from_block_action(std::size_t n, const std::function<Matrix(const Matrix&)>& phi) {
  Matrix c(n * n, n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t pp = 0; pp < n; ++pp) {
      const Matrix img = phi(Matrix::unit(n, p, pp));
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t l = 0; l < n; ++l) c(pp + n * l, p + n * m) = img(m, l);
    }
  return c;
}

inline ModuleMapChoi choi_of(const KrausMap& phi) {
  const auto& alg = phi.algebra();
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < alg.blocks(); ++i) {
    const auto n = alg.dim(i);
    Matrix c(n * n, n * n);
    for (const auto& a : phi.kraus()) {
      const auto v = vec(a.block(i));
      c += outer(v, v);
    }
    blocks.push_back(std::move(c));
  }
  return {alg, std::move(blocks)};
}

// Spectral Kraus extraction: each eigenpair (λ, v) of C_i with λ > eps·max(1, ||C_i||)
// gives √λ·unvec(v) on block i. Kraus operator j collects the j-th
// eigenpair of every block, so the count is the largest Choi rank.
inline KrausMap kraus_from_choi(const ModuleMapChoi& c, const Tolerances& tol = {}) {
  const auto& alg = c.algebra();
  std::vector<std::vector<Matrix>> per_block(alg.blocks());
  std::size_t count = 0;
  for (std::size_t i = 0; i < alg.blocks(); ++i) {
    const auto n = alg.dim(i);
    const Matrix& ci = c.choi_block(i);
    const double scale = std::max(1.0, ci.max_abs());
    if (ci.hermiticity_residual() > tol.eig * scale) throw Error("choi block is not hermitian");
    const auto es = numerics::eigh_hermitian(ci);
    if (es.values.back() < -tol.eig * scale) throw Error("not completely positive: choi block " + std::to_string(i) +
                                                         " has eigenvalue " + std::to_string(es.values.back()));
    for (std::size_t k = 0; k < es.values.size(); ++k) {
      if (es.values[k] <= tol.eig * scale) break;
      const auto v = column(es.vectors, k);
      per_block[i].push_back(unvec(v, n, n) * std::sqrt(es.values[k]));
    }
    count = std::max(count, per_block[i].size());
  }
  std::vector<Element> kraus;
  for (std::size_t j = 0; j < count; ++j) {
    Element a = Element::zero(alg);
    for (std::size_t i = 0; i < alg.blocks(); ++i)
      if (j < per_block[i].size()) a.block(i) = per_block[i][j];
    kraus.push_back(std::move(a));
  }
  return {alg, std::move(kraus)};
}

// Appends √(1 - Σ a*a) to a subunital Kraus list.
inline KrausMap unitalize(const KrausMap& phi, const Tolerances& tol = {}) {
  const Element defect = Element::identity(phi.algebra()) - phi.gram();
  if (!defect.is_positive(tol.eig)) throw Error("unitalize: map is not subunital");
  std::vector<Matrix> root;
  for (const auto& b : defect.blocks()) root.push_back(numerics::sqrtm_psd(b.hermitian_part()));
  auto kraus = phi.kraus();
  kraus.emplace_back(phi.algebra(), std::move(root));
  return {phi.algebra(), std::move(kraus)};
}

// a_j ↦ a_j (s + δ)^{-1/2} with s = Σ a*a, followed by one unregularized
// pass so the result is unital to rounding.
inline KrausMap normalize_kraus(const KrausMap& phi, double delta = 1e-8) {
  auto pass = [&](const std::vector<Element>& in, double d) {
    Element s = Element::zero(phi.algebra());
    for (const auto& a : in) s += a.adjoint() * a;
    std::vector<Matrix> inv;
    for (const auto& b : s.blocks()) inv.push_back(numerics::inv_sqrtm(b.hermitian_part(), d));
    const Element inv_root(phi.algebra(), std::move(inv));
    std::vector<Element> out;
    for (const auto& a : in) out.push_back(a * inv_root);
    return out;
  };
  auto k1 = pass(phi.kraus(), delta);
  return {phi.algebra(), pass(k1, 0.0)};
}

namespace detail {
inline Matrix gaussian_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (auto& v : m.data()) {
    const double re = g(rng);
    const double im = g(rng);
    v = cplx(re, im);
  }
  return m;
}
}  // namespace detail

inline KrausMap random_elementary(const AlgebraSpec& a, int k, std::uint64_t seed) {
  if (k < 1) throw Error("random_elementary: need at least one Kraus operator");
  std::mt19937_64 rng(seed);
  std::vector<Element> kraus;
  for (int j = 0; j < k; ++j) {
    std::vector<Matrix> b;
    for (auto n : a.block_dims()) b.push_back(detail::gaussian_matrix(n, n, rng));
    kraus.emplace_back(a, std::move(b));
  }
  return normalize_kraus(KrausMap(a, std::move(kraus)));
}

// Identity map: single Kraus operator 1.
inline KrausMap identity_map(const AlgebraSpec& a) { return {a, {Element::identity(a)}}; }

}  // namespace vnmix

#endif  // VNMIX_CHANNELS_HPP
