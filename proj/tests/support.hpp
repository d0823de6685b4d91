#ifndef VNMIX_TESTS_SUPPORT_HPP
#define VNMIX_TESTS_SUPPORT_HPP

// Shared helpers: Eigen as an independent eigensolver, random generators.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "vnmix/matrix.hpp"
#include "vnmix/channels.hpp"

namespace vnmix::test {

inline Eigen::MatrixXcd to_eigen(const Matrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

// ascending eigenvalues of a hermitian matrix, computed by Eigen
inline std::vector<double> eigen_values(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

inline double eigen_min(const Matrix& m) { return eigen_values(m).front(); }

inline double eigen_trace_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : eigen_values(m)) s += std::abs(v);
  return s;
}

inline Matrix random_hermitian_matrix(std::size_t n, std::mt19937_64& rng) {
  const Matrix g = detail::gaussian_matrix(n, n, rng);
  return (g + g.adjoint()) * cplx(0.5);
}

inline Matrix random_psd_matrix(std::size_t n, std::size_t rank, std::mt19937_64& rng) {
  const Matrix g = detail::gaussian_matrix(n, rank, rng);
  return (g * g.adjoint()).hermitian_part();
}

inline double max_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

}  // namespace vnmix::test

#endif  // VNMIX_TESTS_SUPPORT_HPP
