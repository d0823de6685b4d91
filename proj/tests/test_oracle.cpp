#include <gtest/gtest.h>

#include "support.hpp"
#include "vnmix/oracle.hpp"

using namespace vnmix;
using numerics::Feasibility;

namespace {
Functional diag_functional(const AlgebraSpec& a, const std::vector<std::vector<double>>& diags) {
  std::vector<Matrix> d;
  for (const auto& v : diags) d.push_back(Matrix::diag(v));
  return {a, d};
}

// yes verdicts are exact ties (margin near 0); no verdicts must clear the band
bool decisive(const Decision& d) {
  return d.verdict == Verdict::yes || (d.verdict == Verdict::no && -d.margin >= 10 * d.band);
}
}  // namespace

TEST(ChoiOracle, SelfPairIsFeasible) {
  const auto w = oracle::random_state(AlgebraSpec::validate({2, 3}), 1);
  const auto rep = oracle::choi_membership_oracle(w, w);
  ASSERT_EQ(rep.verdict(), Verdict::yes) << rep.detail;
  ASSERT_TRUE(rep.choi);
  EXPECT_TRUE(rep.choi->is_completely_positive(1e-7));
  EXPECT_LE(rep.choi->unitality_residual(), 1e-7);
}

TEST(ChoiOracle, UnequalCentersAreInfeasible) {
  const auto a = AlgebraSpec::validate({2, 2});
  const auto w = oracle::random_state(a, 2, {std::vector<double>{0.5, 0.5}, std::nullopt});
  const auto r = oracle::random_state(a, 3, {std::vector<double>{0.6, 0.4}, std::nullopt});
  const auto rep = oracle::choi_membership_oracle(w, r);
  EXPECT_EQ(rep.verdict(), Verdict::no);
  EXPECT_FALSE(rep.choi);
}

TEST(ChoiOracle, Errors) {
  const auto a = AlgebraSpec::validate({2});
  const auto w = oracle::random_state(a, 1);
  EXPECT_THROW(oracle::choi_membership_oracle(w, oracle::random_state(AlgebraSpec::validate({3}), 1)), Error);
  EXPECT_THROW(oracle::choi_membership_oracle(diag_functional(a, {{0.5, -0.5}}), w), Error);
  const auto big = AlgebraSpec::validate({5});
  EXPECT_THROW(oracle::choi_membership_oracle(oracle::random_state(big, 1), oracle::random_state(big, 2)), Error);
  const auto many = AlgebraSpec::validate({1, 1, 1, 1});
  EXPECT_THROW(oracle::check_caps(many), Error);
}

TEST(ChoiOracle, AgreesWithStateCriterion) {
  std::mt19937_64 rng(40);
  int compared = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const auto a = oracle::random_algebra(rng, 3, 3);
    const auto w = oracle::random_state(a, rng());
    const auto r = rep % 2 ? oracle::random_companion(w, rng()) : oracle::random_state(a, rng());
    const auto d = check_state_reachable(w, r);
    if (!decisive(d)) continue;
    ++compared;
    const auto o = oracle::choi_membership_oracle(w, r);
    EXPECT_EQ(o.verdict(), d.verdict) << o.detail;
    EXPECT_EQ(check_more_mixed(w, r).verdict, d.verdict);
    if (o.choi) {
      // sampling soundness
      const auto phi = kraus_from_choi(*o.choi);
      EXPECT_LE(predual_apply(phi, w).max_entry_difference(r), 1e-7);
    }
  }
  EXPECT_GE(compared, 25);
}

TEST(ChoiOracle, HermitianModeAgrees) {
  std::mt19937_64 rng(41);
  int yes = 0, no = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const auto a = oracle::random_algebra(rng, 2, 3);
    const auto w = oracle::random_hermitian(a, rng());
    const auto r = oracle::random_companion(w, rng(), rep % 2 == 0);
    const auto d = check_hermitian_reachable(w, r);
    if (!decisive(d)) continue;
    (d.verdict == Verdict::yes ? yes : no)++;
    const auto o = oracle::choi_membership_oracle(w, r, true);
    EXPECT_EQ(o.verdict(), d.verdict) << o.detail;
    if (o.choi) {
      EXPECT_LE(predual_apply(kraus_from_choi(*o.choi), w).max_entry_difference(r), 1e-7);
    }
  }
  EXPECT_GT(yes, 5);
  EXPECT_GT(no, 5);
}

TEST(VariationalNorm, Examples) {
  const auto a = AlgebraSpec::validate({2, 1});
  const auto w = oracle::random_state(a, 4);
  EXPECT_NEAR(oracle::variational_ideal_norm(w, Ideal::whole(a)), 1.0, 1e-12);
  const auto j = Ideal::from_blocks(a, {0});
  EXPECT_NEAR(oracle::variational_ideal_norm(w, j), w.density(0).trace().real(), 1e-12);
  const auto m2 = AlgebraSpec::validate({2});
  EXPECT_NEAR(oracle::variational_ideal_norm(diag_functional(m2, {{0.5, -0.5}}), Ideal::whole(m2)), 1.0, 1e-15);
  EXPECT_EQ(oracle::variational_ideal_norm(w, Ideal::zero(a)), 0.0);
}

TEST(VariationalNorm, MatchesClosedForm) {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = oracle::random_algebra(rng);
    const auto w = oracle::random_hermitian(a, rng());
    for (const auto& j : enumerate_ideals(a).ideals) {
      const double v = oracle::variational_ideal_norm(w, j, rng(), 4);
      EXPECT_LE(v, ideal_norm(w, j) + 1e-12);
      EXPECT_NEAR(v, ideal_norm(w, j), 1e-9);
    }
  }
}

TEST(Generators, PrescribedCenter) {
  const auto a = AlgebraSpec::validate({2, 3});
  const auto w = oracle::random_state(a, 5, {std::vector<double>{0.3, 0.7}, std::nullopt});
  EXPECT_NEAR(restrict_to_center(w).re(0), 0.3, 1e-12);
  EXPECT_NEAR(restrict_to_center(w).re(1), 0.7, 1e-12);
  EXPECT_TRUE(w.is_state(1e-12));
}

TEST(Generators, Deterministic) {
  const auto a = AlgebraSpec::validate({2, 3});
  EXPECT_EQ(oracle::random_state(a, 6).max_entry_difference(oracle::random_state(a, 6)), 0.0);
  EXPECT_EQ(oracle::random_hermitian(a, 6).max_entry_difference(oracle::random_hermitian(a, 6)), 0.0);
  EXPECT_GT(oracle::random_state(a, 6).max_entry_difference(oracle::random_state(a, 7)), 0.0);
}

TEST(Generators, ForcedSplit) {
  const auto a = AlgebraSpec::validate({3});
  const auto w = oracle::random_hermitian(a, 8, {std::vector<double>{0.0}, std::vector<double>{1.0}});
  const auto jp = jordan_decompose(w);
  EXPECT_NEAR(jp.positive_part.total_mass(), 0.5, 1e-12);
  EXPECT_NEAR(jp.negative_part.total_mass(), 0.5, 1e-12);
}

TEST(Generators, PrescribedTracesAndNorms) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = oracle::random_algebra(rng);
    const auto w = oracle::random_hermitian(a, rng());
    const auto spectra = restrict_to_center(w).real_values();
    for (std::size_t i = 0; i < a.blocks(); ++i)
      EXPECT_LE(std::abs(spectra[i]), test::eigen_trace_norm(w.density(i)) + 1e-12);
    const auto r = oracle::random_companion(w, rng());
    for (std::size_t i = 0; i < a.blocks(); ++i) {
      EXPECT_NEAR(r.density(i).trace().real(), w.density(i).trace().real(), 1e-12);
      EXPECT_LE(test::eigen_trace_norm(r.density(i)), test::eigen_trace_norm(w.density(i)) + 1e-12);
    }
  }
}

TEST(Generators, Errors) {
  const auto a = AlgebraSpec::validate({2, 2});
  EXPECT_THROW(oracle::random_hermitian(a, 1, {std::vector<double>{0.5, 0.0}, std::vector<double>{0.2, 1.0}}), Error);
  EXPECT_THROW(oracle::random_hermitian(a, 1, {std::nullopt, std::vector<double>{-1.0, 1.0}}), Error);
  EXPECT_THROW(oracle::random_hermitian(a, 1, {std::vector<double>{0.5}, std::nullopt}), Error);
  EXPECT_THROW(oracle::random_state(a, 1, {std::vector<double>{0.5, 0.6}, std::nullopt}), Error);
  EXPECT_THROW(oracle::random_state(a, 1, {std::vector<double>{1.2, -0.2}, std::nullopt}), Error);
  EXPECT_THROW(oracle::random_state(a, 1, {std::nullopt, std::vector<std::size_t>{3, 1}}), Error);
  const auto one = AlgebraSpec::validate({1});
  EXPECT_THROW(oracle::random_hermitian(one, 1, {std::vector<double>{0.0}, std::vector<double>{1.0}}), Error);
}

TEST(SplitWitness, AgreesWithClosedForm) {
  std::mt19937_64 rng(44);
  int compared = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const auto a = oracle::random_algebra(rng, 3, 3);
    const auto w = oracle::random_hermitian(a, rng());
    const auto r = oracle::random_companion(w, rng(), rep % 2 == 0);
    const auto g = check_hermitian_reachable_general(w, r);
    if (!decisive(g.decision)) continue;
    ++compared;
    const auto o = oracle::split_witness_oracle(w, r);
    EXPECT_EQ(o.verdict(), g.decision.verdict) << o.detail;
    if (o.rho1 && o.rho2) {
      EXPECT_LE((*o.rho1 - *o.rho2).max_entry_difference(r), 1e-6);
      EXPECT_TRUE(o.rho1->is_positive(1e-6));
      EXPECT_TRUE(o.rho2->is_positive(1e-6));
    }
  }
  EXPECT_GE(compared, 30);
}
