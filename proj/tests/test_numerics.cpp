#include <gtest/gtest.h>

#include "support.hpp"
#include "vnmix/numerics/dykstra.hpp"
#include "vnmix/numerics/eigh.hpp"

using namespace vnmix;
using namespace vnmix::numerics;

TEST(Eigh, IdentityHasUnitSpectrum) {
  const auto es = eigh_hermitian(Matrix::identity(3));
  for (double v : es.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Eigh, DiagonalSortsDescending) {
  const auto es = eigh_hermitian(Matrix::diag({3.0, 1.0, 2.0}));
  ASSERT_EQ(es.values.size(), 3u);
  EXPECT_DOUBLE_EQ(es.values[0], 3.0);
  EXPECT_DOUBLE_EQ(es.values[1], 2.0);
  EXPECT_DOUBLE_EQ(es.values[2], 1.0);
}

TEST(Eigh, InvolutionEigenvectors) {
  const auto es = eigh_hermitian(Matrix{{0.0, 1.0}, {1.0, 0.0}});
  EXPECT_NEAR(es.values[0], 1.0, 1e-15);
  EXPECT_NEAR(es.values[1], -1.0, 1e-15);
  const double s = 1.0 / std::sqrt(2.0);
  // first nonzero entry of each eigenvector is real positive
  EXPECT_NEAR(std::abs(es.vectors(0, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(1, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(0, 1) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(1, 1) + s), 0.0, 1e-15);
}

TEST(Eigh, RejectsNonHermitian) {
  EXPECT_THROW(eigh_hermitian(Matrix{{0.0, 1.0}, {0.0, 0.0}}), Error);
}

TEST(Eigh, RandomReconstructionOrthonormalityAndEigenAgreement) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 32u, 64u}) {
    for (int rep = 0; rep < 3; ++rep) {
      const Matrix m = test::random_hermitian_matrix(n, rng);
      const auto es = eigh_hermitian(m);
      const double scale = std::max(1.0, es.values.empty() ? 0.0 : std::max(std::abs(es.values.front()),
                                                                             std::abs(es.values.back())));
      EXPECT_LE((m - es.reconstruct()).frobenius(), 1e-10 * scale) << "n=" << n;
      EXPECT_LE((es.vectors.adjoint() * es.vectors - Matrix::identity(n)).max_abs(), 1e-10);
      for (std::size_t k = 1; k < n; ++k) EXPECT_GE(es.values[k - 1], es.values[k]);
      auto ref = test::eigen_values(m);
      std::reverse(ref.begin(), ref.end());
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(es.values[k], ref[k], 1e-10 * scale);
    }
  }
}

TEST(Eigh, DegenerateSpectrum) {
  std::mt19937_64 rng(5);
  const Matrix u = [&] {
    const auto es = eigh_hermitian(test::random_hermitian_matrix(4, rng));
    return es.vectors;
  }();
  const Matrix m = (u * Matrix::diag({2.0, 2.0, -1.0, -1.0}) * u.adjoint()).hermitian_part();
  const auto es = eigh_hermitian(m);
  EXPECT_NEAR(es.values[0], 2.0, 1e-12);
  EXPECT_NEAR(es.values[3], -1.0, 1e-12);
  EXPECT_LE((m - es.reconstruct()).max_abs(), 1e-12);
}

TEST(PsdProject, IdempotentAndNonExpansive) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rep % 6;
    const Matrix a = test::random_hermitian_matrix(n, rng);
    const Matrix b = test::random_hermitian_matrix(n, rng);
    const Matrix pa = psd_project(a);
    EXPECT_LE((psd_project(pa) - pa).max_abs(), 1e-12);
    EXPECT_GE(test::eigen_min(pa), -1e-12);
    EXPECT_LE((pa - psd_project(b)).frobenius(), (a - b).frobenius() + 1e-12);
  }
}

TEST(SpectralHelpers, TraceNormSqrtPinv) {
  std::mt19937_64 rng(8);
  const Matrix h = test::random_hermitian_matrix(5, rng);
  EXPECT_NEAR(trace_norm(h), test::eigen_trace_norm(h), 1e-12);
  const Matrix p = test::random_psd_matrix(4, 4, rng);
  const Matrix s = sqrtm_psd(p);
  EXPECT_LE((s * s - p).max_abs(), 1e-11);
  const Matrix q = test::random_psd_matrix(4, 2, rng);
  const Matrix qp = pinv_hermitian(q);
  EXPECT_LE((q * qp * q - q).max_abs(), 1e-10);
  const Matrix r = range_projection(q, 1e-10);
  EXPECT_NEAR(r.trace().real(), 2.0, 1e-12);
  EXPECT_LE((r * q - q).max_abs(), 1e-11);
}

namespace {

FeasibilityProblem two_by_two(std::vector<AffineConstraint> cs, Method m) {
  FeasibilityProblem p;
  p.dimension = 2;
  p.constraints = std::move(cs);
  p.options.method = m;
  return p;
}

const Matrix kRe12 = Matrix{{0.0, 0.5}, {0.5, 0.0}};
const Matrix kIm12 = Matrix{{0.0, cplx(0, 0.5)}, {cplx(0, -0.5), 0.0}};

class BothMethods : public ::testing::TestWithParam<Method> {};

}  // namespace

TEST_P(BothMethods, TraceAndBalancedDiagonalIsFeasible) {
  const auto res = solve_feasibility(
      two_by_two({{Matrix::identity(2), 1.0}, {Matrix::diag({1.0, -1.0}), 0.0}}, GetParam()));
  ASSERT_EQ(res.status, Feasibility::feasible);
  EXPECT_NEAR((*res.point)(0, 0).real(), 0.5, 1e-7);
  EXPECT_NEAR((*res.point)(1, 1).real(), 0.5, 1e-7);
  EXPECT_GE(res.min_eigenvalue, -1e-7);
}

TEST_P(BothMethods, ContradictoryTracesAreAlgebraicallyInfeasible) {
  const auto res = solve_feasibility(two_by_two({{Matrix::identity(2), 1.0}, {Matrix::identity(2), 2.0}}, GetParam()));
  EXPECT_EQ(res.status, Feasibility::infeasible);
  EXPECT_TRUE(res.algebraic);
}

TEST_P(BothMethods, LargeOffDiagonalIsInfeasible) {
  // X11 X22 <= 0.25 at unit trace, but |X12|^2 = 0.49 is required
  const auto res =
      solve_feasibility(two_by_two({{Matrix::identity(2), 1.0}, {kRe12, 0.7}, {kIm12, 0.0}}, GetParam()));
  EXPECT_EQ(res.status, Feasibility::infeasible);
  EXPECT_FALSE(res.algebraic);
}

TEST_P(BothMethods, StrictlyFeasibleSampledProblemsAreFeasible) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rep % 4;
    Matrix x0 = test::random_psd_matrix(n, n, rng) + Matrix::identity(n) * cplx(0.5);
    FeasibilityProblem p;
    p.dimension = n;
    p.options.method = GetParam();
    for (std::size_t k = 0; k < n + 2; ++k) {
      const Matrix a = test::random_hermitian_matrix(n, rng);
      p.constraints.push_back({a, trace_product(a, x0).real()});
    }
    const auto res = solve_feasibility(p);
    ASSERT_EQ(res.status, Feasibility::feasible) << res.detail;
    AffineProjector aff(p);
    EXPECT_LE(aff.residual(*res.point), 1e-7);
    EXPECT_GE(test::eigen_min(*res.point), -1e-7);
  }
}

INSTANTIATE_TEST_SUITE_P(Feasibility, BothMethods,
                         ::testing::Values(Method::douglas_rachford, Method::dykstra));

TEST(Feasibility, ValidationRejectsBadProblems) {
  FeasibilityProblem p;
  p.dimension = 2;
  EXPECT_THROW(dykstra_feasibility(p), Error);
  p.constraints.push_back({Matrix{{0.0, 1.0}, {0.0, 0.0}}, 0.0});
  EXPECT_THROW(dykstra_feasibility(p), Error);
  p.constraints = {{Matrix::identity(3), 1.0}};
  EXPECT_THROW(douglas_rachford_feasibility(p), Error);
}
