#ifndef VNMIX_ALGEBRA_HPP
#define VNMIX_ALGEBRA_HPP

// Finite-dimensional von Neumann algebras A = M_{n_1} ⊕ ... ⊕ M_{n_B},
// their elements, centers and ideals.
//
// Every closed two-sided ideal of A is a sub-sum over a set of blocks, so
// ideals are stored by their block support. The center is the algebra of
// block-wise scalars, i.e. functions on the block index set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vnmix/matrix.hpp"
#include "vnmix/numerics/eigh.hpp"

namespace vnmix {

// Shared numerical tolerances; every operation takes them explicitly so
// callers (and the CLI) can override them.
struct Tolerances {
  double eig = 1e-10;     // spectral cutoffs: positivity, support rank
  double unital = 1e-9;   // ||Σ a*a - 1||
  double feas = 1e-7;     // convex feasibility acceptance
  double dec = 1e-9;      // decision band, scaled by max(||ω||, ||ρ||, 1)
};

class AlgebraSpec {
 public:
  AlgebraSpec() = default;

  static AlgebraSpec validate(std::vector<int> block_dims) {
    if (block_dims.empty()) throw Error("algebra must have at least one block");
    for (int n : block_dims)
      if (n < 1) throw Error("block dimension must be >= 1");
    AlgebraSpec a;
    a.dims_.assign(block_dims.begin(), block_dims.end());
    return a;
  }

  const std::vector<std::size_t>& block_dims() const { return dims_; }
  std::size_t blocks() const { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t center_dim() const { return dims_.size(); }
  std::size_t total_dim() const {
    std::size_t s = 0;
    for (auto n : dims_) s += n * n;
    return s;
  }
  // dimension of the defining representation ⊕ C^{n_i}
  std::size_t hilbert_dim() const { return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0}); }
  bool abelian() const {
    return std::all_of(dims_.begin(), dims_.end(), [](std::size_t n) { return n == 1; });
  }

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) s += (i ? "," : "") + std::to_string(dims_[i]);
    return s + "]";
  }

 private:
  std::vector<std::size_t> dims_;
};

inline void require_same(const AlgebraSpec& a, const AlgebraSpec& b) {
  if (!(a == b)) throw Error("algebra mismatch: " + a.to_string() + " vs " + b.to_string());
}

class CenterElement;

class Element {
 public:
  Element() = default;
  Element(AlgebraSpec alg, std::vector<Matrix> blocks) : alg_(std::move(alg)), blocks_(std::move(blocks)) {
    if (blocks_.size() != alg_.blocks()) throw Error("element has wrong number of blocks");
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].rows() != alg_.dim(i) || blocks_[i].cols() != alg_.dim(i))
        throw Error("element block " + std::to_string(i) + " has wrong shape");
  }

  static Element zero(const AlgebraSpec& a) {
    std::vector<Matrix> b;
    for (auto n : a.block_dims()) b.emplace_back(n, n);
    return {a, std::move(b)};
  }
  static Element identity(const AlgebraSpec& a) {
    std::vector<Matrix> b;
    for (auto n : a.block_dims()) b.push_back(Matrix::identity(n));
    return {a, std::move(b)};
  }
  // x supported on a single block
  static Element on_block(const AlgebraSpec& a, std::size_t i, Matrix m) {
    Element e = zero(a);
    e.blocks_.at(i) = std::move(m);
    if (e.blocks_[i].rows() != a.dim(i) || e.blocks_[i].cols() != a.dim(i)) throw Error("block shape mismatch");
    return e;
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_.at(i); }
  Matrix& block(std::size_t i) { return blocks_.at(i); }

  Element adjoint() const {
    Element r = *this;
    for (auto& b : r.blocks_) b = b.adjoint();
    return r;
  }

  // C*-norm: max over blocks of the largest singular value
  double norm() const {
    double m = 0.0;
    for (const auto& b : blocks_)
      m = std::max(m, std::sqrt(std::max(0.0, numerics::max_eigenvalue(b.adjoint() * b))));
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& b : blocks_) m = std::max(m, b.max_abs());
    return m;
  }

  bool is_hermitian(double tol) const {
    for (const auto& b : blocks_)
      if (b.hermiticity_residual() > tol * std::max(1.0, b.max_abs())) return false;
    return true;
  }
  bool is_positive(double tol) const {
    if (!is_hermitian(tol)) return false;
    for (const auto& b : blocks_)
      if (!numerics::is_psd(b, tol)) return false;
    return true;
  }
  bool is_projection(double tol) const {
    if (!is_hermitian(tol)) return false;
    for (const auto& b : blocks_)
      if ((b * b - b).max_abs() > tol * std::max(1.0, b.max_abs())) return false;
    return true;
  }

  Element& operator+=(const Element& o) {
    require_same(alg_, o.alg_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
  }
  Element& operator-=(const Element& o) {
    require_same(alg_, o.alg_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
  }
  Element& operator*=(cplx s) {
    for (auto& b : blocks_) b *= s;
    return *this;
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, cplx s) { return a *= s; }
  friend Element operator*(cplx s, Element a) { return a *= s; }
  friend Element operator*(const Element& a, const Element& b) {
    require_same(a.alg_, b.alg_);
    Element r = a;
    for (std::size_t i = 0; i < r.blocks_.size(); ++i) r.blocks_[i] = a.blocks_[i] * b.blocks_[i];
    return r;
  }

 private:
  AlgebraSpec alg_;
  std::vector<Matrix> blocks_;
};

class CenterElement {
 public:
  CenterElement() = default;
  CenterElement(AlgebraSpec alg, std::vector<cplx> values) : alg_(std::move(alg)), values_(std::move(values)) {
    if (values_.size() != alg_.blocks()) throw Error("center element has wrong number of values");
  }
  static CenterElement real(AlgebraSpec alg, const std::vector<double>& v) {
    return {std::move(alg), std::vector<cplx>(v.begin(), v.end())};
  }
  static CenterElement constant(const AlgebraSpec& alg, double c) {
    return {alg, std::vector<cplx>(alg.blocks(), c)};
  }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx operator[](std::size_t i) const { return values_.at(i); }
  double re(std::size_t i) const { return values_.at(i).real(); }
  std::vector<double> real_values() const {
    std::vector<double> r;
    for (const auto& v : values_) r.push_back(v.real());
    return r;
  }

  bool is_positive(double tol) const {
    return std::all_of(values_.begin(), values_.end(),
                       [tol](cplx v) { return std::abs(v.imag()) <= tol && v.real() >= -tol; });
  }

  Element embed() const {
    std::vector<Matrix> b;
    for (std::size_t i = 0; i < values_.size(); ++i) b.push_back(Matrix::identity(alg_.dim(i)) * values_[i]);
    return {alg_, std::move(b)};
  }

  // z·x for x in A
  Element times(const Element& x) const {
    require_same(alg_, x.algebra());
    Element r = x;
    for (std::size_t i = 0; i < values_.size(); ++i) r.block(i) *= values_[i];
    return r;
  }

  friend bool operator==(const CenterElement&, const CenterElement&) = default;

 private:
  AlgebraSpec alg_;
  std::vector<cplx> values_;
};

class Ideal {
 public:
  Ideal() = default;
  Ideal(AlgebraSpec alg, std::vector<bool> support) : alg_(std::move(alg)), support_(std::move(support)) {
    if (support_.size() != alg_.blocks()) throw Error("ideal support has wrong length");
  }
  static Ideal from_mask(const AlgebraSpec& alg, std::uint64_t mask) {
    std::vector<bool> s(alg.blocks());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = (mask >> i) & 1u;
    return {alg, std::move(s)};
  }
  static Ideal from_blocks(const AlgebraSpec& alg, const std::vector<std::size_t>& blocks) {
    std::vector<bool> s(alg.blocks());
    for (auto b : blocks) s.at(b) = true;
    return {alg, std::move(s)};
  }
  static Ideal whole(const AlgebraSpec& alg) { return {alg, std::vector<bool>(alg.blocks(), true)}; }
  static Ideal zero(const AlgebraSpec& alg) { return {alg, std::vector<bool>(alg.blocks(), false)}; }

  const AlgebraSpec& algebra() const { return alg_; }
  const std::vector<bool>& support() const { return support_; }
  bool contains_block(std::size_t i) const { return support_.at(i); }
  std::vector<std::size_t> blocks() const {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < support_.size(); ++i)
      if (support_[i]) r.push_back(i);
    return r;
  }
  bool is_zero() const { return std::none_of(support_.begin(), support_.end(), [](bool b) { return b; }); }

  bool contains(const Element& x, double tol = 0.0) const {
    require_same(alg_, x.algebra());
    for (std::size_t i = 0; i < support_.size(); ++i)
      if (!support_[i] && x.block(i).max_abs() > tol) return false;
    return true;
  }

  // central projection onto the ideal's blocks
  CenterElement indicator() const {
    std::vector<double> v;
    for (bool b : support_) v.push_back(b ? 1.0 : 0.0);
    return CenterElement::real(alg_, v);
  }

  friend bool operator==(const Ideal&, const Ideal&) = default;

  // 1-based block labels, e.g. "{1,3}"
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < support_.size(); ++i)
      if (support_[i]) {
        s += (first ? "" : ",") + std::to_string(i + 1);
        first = false;
      }
    return s + "}";
  }

 private:
  AlgebraSpec alg_;
  std::vector<bool> support_;
};

inline constexpr std::size_t kIdealEnumerationCap = 20;

struct IdealLattice {
  std::vector<Ideal> ideals;          // all 2^B, ordered by bitmask
  std::vector<Ideal> maximal_ideals;  // complement of each singleton
  Ideal strong_radical;               // intersection of the maximal ideals
};

inline IdealLattice enumerate_ideals(const AlgebraSpec& a, std::size_t cap = kIdealEnumerationCap) {
  const std::size_t b = a.blocks();
  if (b > cap) throw Error("ideal lattice too large: " + std::to_string(b) + " blocks exceeds cap " + std::to_string(cap));
  IdealLattice lat;
  const std::uint64_t count = std::uint64_t{1} << b;
  lat.ideals.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) lat.ideals.push_back(Ideal::from_mask(a, m));
  std::vector<bool> radical(b, true);
  for (std::size_t i = 0; i < b; ++i) {
    std::vector<bool> s(b, true);
    s[i] = false;
    for (std::size_t j = 0; j < b; ++j) radical[j] = radical[j] && s[j];
    lat.maximal_ideals.emplace_back(a, std::move(s));
  }
  lat.strong_radical = Ideal(a, radical);
  return lat;
}

struct CentralCarrier {
  CenterElement carrier;             // ||h_i|| on block i
  std::vector<double> lower_bounds;  // min eigenvalue of h_i
  std::vector<double> upper_bounds;  // max eigenvalue of h_i
};

// Smallest central c with h <= c·1, plus per-block spectral bounds.
inline CentralCarrier central_carrier(const Element& h, const Tolerances& tol = {}) {
  if (!h.is_positive(tol.eig)) throw Error("central carrier: element is not positive");
  CentralCarrier cc;
  std::vector<double> vals;
  for (const auto& b : h.blocks()) {
    const auto es = numerics::eigh_hermitian(b);
    const double top = std::max(0.0, es.values.front());
    vals.push_back(top);
    cc.upper_bounds.push_back(es.values.front());
    cc.lower_bounds.push_back(es.values.back());
  }
  cc.carrier = CenterElement::real(h.algebra(), vals);
  return cc;
}

}  // namespace vnmix

#endif  // VNMIX_ALGEBRA_HPP
