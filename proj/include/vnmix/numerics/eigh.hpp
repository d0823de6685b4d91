#ifndef VNMIX_NUMERICS_EIGH_HPP
#define VNMIX_NUMERICS_EIGH_HPP

// Cyclic Jacobi eigensolver for complex hermitian matrices and the spectral
// helpers built on it (PSD clipping, square roots, pseudo-inverse).
//
// Each rotation is a 2x2 unitary acting on rows/columns (p, q): a phase that
// makes a_pq real followed by a real Jacobi rotation that annihilates it.
// Sweeps visit (p, q) in row-major order, so the result is a deterministic
// function of the input.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "vnmix/matrix.hpp"

namespace vnmix::numerics {

struct EighOptions {
  double hermitian_tol = 1e-8;
  // stop once the off-diagonal Frobenius mass is below rel_tol * ||M||_F
  double rel_tol = 1e-15;
  int max_sweeps = 100;
};

struct Eigensystem {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns are orthonormal eigenvectors
  int sweeps = 0;

  Matrix reconstruct() const;
};

namespace detail {

inline double off_diagonal_mass(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Fix the phase of each column so its first entry above `eps` is real positive.
inline void normalize_phases(Matrix& v, double eps = 1e-12) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const double mag = std::abs(v(i, j));
      if (mag > eps) {
        const cplx phase = std::conj(v(i, j)) / mag;
        for (std::size_t k = 0; k < v.rows(); ++k) v(k, j) *= phase;
        v(i, j) = mag;
        break;
      }
    }
  }
}

}  // namespace detail

inline Eigensystem eigh_hermitian(const Matrix& m, const EighOptions& opt = {}) {
  if (!m.square()) throw Error("eigh: matrix is not square");
  const double scale = std::max(1.0, m.max_abs());
  if (m.hermiticity_residual() > opt.hermitian_tol * scale)
    throw Error("eigh: matrix is not hermitian");

  const std::size_t n = m.rows();
  Matrix a = m.hermitian_part();
  Matrix v = Matrix::identity(n);
  const double target = opt.rel_tol * std::max(a.frobenius(), 1e-300);

  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    if (detail::off_diagonal_mass(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx g = a(p, q);
        const double mag = std::abs(g);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // skip rotations that cannot change the diagonal in double precision
        if (sweep > 3 && mag < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const cplx e = g / mag;
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U = [[c, s], [-s·conj(e), c·conj(e)]] on coordinates (p, q)
        const cplx u_pp = c, u_pq = s, u_qp = -s * std::conj(e), u_qq = c * std::conj(e);
        for (std::size_t k = 0; k < n; ++k) {  // A <- A U
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- U* A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {  // V <- V U
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  Eigensystem es;
  es.values.resize(n);
  es.vectors = Matrix(n, n);
  es.sweeps = sweep;
  for (std::size_t c = 0; c < n; ++c) {
    es.values[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) es.vectors(r, c) = v(r, order[c]);
  }
  detail::normalize_phases(es.vectors);
  return es;
}

// V f(Λ) V*
inline Matrix spectral_apply(const Eigensystem& es, const std::function<double(double)>& f) {
  const std::size_t n = es.values.size();
  Matrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(es.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = es.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(es.vectors(j, k));
    }
  }
  return r;
}

inline Matrix Eigensystem::reconstruct() const {
  return spectral_apply(*this, [](double x) { return x; });
}

inline Matrix spectral_apply(const Matrix& m, const std::function<double(double)>& f) {
  return spectral_apply(eigh_hermitian(m), f);
}

// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
inline Matrix psd_project(const Matrix& m) {
  return spectral_apply(m, [](double x) { return x > 0.0 ? x : 0.0; });
}

inline double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return eigh_hermitian(m).values.back();
}

inline double max_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return eigh_hermitian(m).values.front();
}

inline double trace_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : eigh_hermitian(m).values) s += std::abs(x);
  return s;
}

// Hermitian-part positive semidefiniteness with tolerance tol * max(1, ||M||).
inline bool is_psd(const Matrix& m, double tol) {
  if (m.rows() == 0) return true;
  const auto es = eigh_hermitian(m);
  const double scale = std::max({1.0, std::abs(es.values.front()), std::abs(es.values.back())});
  return es.values.back() >= -tol * scale;
}

inline Matrix sqrtm_psd(const Matrix& m) {
  return spectral_apply(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

// (M + δ·1)^{-1/2}
inline Matrix inv_sqrtm(const Matrix& m, double delta) {
  return spectral_apply(m, [delta](double x) { return 1.0 / std::sqrt(std::max(x, 0.0) + delta); });
}

// Moore-Penrose inverse of a hermitian matrix; eigenvalues with
// |λ| <= rel_cut * max|λ| are treated as zero.
inline Matrix pinv_hermitian(const Matrix& m, double rel_cut = 1e-12) {
  const auto es = eigh_hermitian(m);
  double top = 0.0;
  for (double x : es.values) top = std::max(top, std::abs(x));
  const double cut = rel_cut * top;
  return spectral_apply(es, [cut](double x) { return std::abs(x) > cut ? 1.0 / x : 0.0; });
}

// Projection onto the span of eigenvectors with eigenvalue above rel_cut * max|λ|.
inline Matrix range_projection(const Matrix& m, double rel_cut) {
  const auto es = eigh_hermitian(m);
  double top = 0.0;
  for (double x : es.values) top = std::max(top, std::abs(x));
  if (top == 0.0) return Matrix(m.rows(), m.cols());
  const double cut = rel_cut * top;
  return spectral_apply(es, [cut](double x) { return x > cut ? 1.0 : 0.0; });
}

}  // namespace vnmix::numerics

#endif  // VNMIX_NUMERICS_EIGH_HPP
