#ifndef VNMIX_MATRIX_HPP
#define VNMIX_MATRIX_HPP

// Small dense complex matrix used by every module. Row-major storage,
// value semantics; sizes here are tens to a few hundred, so no expression
// templates or BLAS.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace vnmix {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw Error("matrix data size mismatch");
  }
  Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix zero(std::size_t n) { return Matrix(n, n); }
  static Matrix diag(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix diag(std::initializer_list<double> d) {
    return diag(std::span<const double>(d.begin(), d.size()));
  }
  // e_{ij}: one at (i, j), zero elsewhere.
  static Matrix unit(std::size_t n, std::size_t i, std::size_t j) {
    Matrix m(n, n);
    m(i, j) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  Matrix adjoint() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }
  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  Matrix conj() const {
    Matrix r = *this;
    for (auto& v : r.data_) v = std::conj(v);
    return r;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  // max |M - M*| entry; zero for exactly hermitian matrices
  double hermiticity_residual() const {
    if (!square()) return INFINITY;
    double r = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i; j < cols_; ++j)
        r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return r;
  }

  Matrix hermitian_part() const {
    Matrix r = *this;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return r;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error("matrix product shape mismatch");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// Frobenius inner product tr(A* B).
inline cplx inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("matrix shape mismatch");
  cplx s = 0.0;
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < ad.size(); ++k) s += std::conj(ad[k]) * bd[k];
  return s;
}

// tr(A B) without forming the product.
inline cplx trace_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw Error("matrix shape mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, i);
  return s;
}

// Kronecker product; the first factor carries the slow index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

// Column-stacking vectorization: vec(a)[p + n*q] = a(p, q).
inline std::vector<cplx> vec(const Matrix& a) {
  std::vector<cplx> v(a.rows() * a.cols());
  for (std::size_t q = 0; q < a.cols(); ++q)
    for (std::size_t p = 0; p < a.rows(); ++p) v[p + a.rows() * q] = a(p, q);
  return v;
}

inline Matrix unvec(std::span<const cplx> v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw Error("unvec size mismatch");
  Matrix a(rows, cols);
  for (std::size_t q = 0; q < cols; ++q)
    for (std::size_t p = 0; p < rows; ++p) a(p, q) = v[p + rows * q];
  return a;
}

inline Matrix outer(std::span<const cplx> u, std::span<const cplx> v) {
  Matrix r(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) r(i, j) = u[i] * std::conj(v[j]);
  return r;
}

inline Matrix column_matrix(std::span<const cplx> v) { return Matrix(v.size(), 1, {v.begin(), v.end()}); }

inline std::vector<cplx> column(const Matrix& m, std::size_t j) {
  std::vector<cplx> c(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
  return c;
}

inline std::vector<cplx> matvec(const Matrix& m, std::span<const cplx> v) {
  if (m.cols() != v.size()) throw Error("matrix-vector shape mismatch");
  std::vector<cplx> r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

inline cplx dot(std::span<const cplx> u, std::span<const cplx> v) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

// Partial traces of an operator on C^a (slow) ⊗ C^b (fast).
inline Matrix partial_trace_fast(const Matrix& m, std::size_t a, std::size_t b) {
  Matrix r(a, a);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j)
      for (std::size_t k = 0; k < b; ++k) r(i, j) += m(i * b + k, j * b + k);
  return r;
}
inline Matrix partial_trace_slow(const Matrix& m, std::size_t a, std::size_t b) {
  Matrix r(b, b);
  for (std::size_t k = 0; k < b; ++k)
    for (std::size_t l = 0; l < b; ++l)
      for (std::size_t i = 0; i < a; ++i) r(k, l) += m(i * b + k, i * b + l);
  return r;
}

// Orthonormal basis of the n x n hermitian matrices under the real
// Frobenius inner product: E_aa, (E_ab + E_ba)/√2, i(E_ab - E_ba)/√2.
inline std::vector<Matrix> hermitian_basis(std::size_t n) {
  std::vector<Matrix> basis;
  basis.reserve(n * n);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t a = 0; a < n; ++a) basis.push_back(Matrix::unit(n, a, a));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      Matrix re(n, n), im(n, n);
      re(a, b) = s;
      re(b, a) = s;
      im(a, b) = cplx(0, s);
      im(b, a) = cplx(0, -s);
      basis.push_back(std::move(re));
      basis.push_back(std::move(im));
    }
  return basis;
}

}  // namespace vnmix

#endif  // VNMIX_MATRIX_HPP
