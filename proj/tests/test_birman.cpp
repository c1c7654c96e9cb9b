#include <gtest/gtest.h>

#include "latspec/birman.hpp"

using namespace latspec;

TEST(BirmanSchwinger, SingleSiteMatrix) {
  const auto e = laplacian(1);
  const auto V = from_samples(1, {{LatticePoint({0}), 0.75}});
  const auto B = bs_matrix(e, V, 0.25);
  ASSERT_EQ(B.size(), 1u);
  // 0.75 * G_{1/4}(0) = 0.75 / sqrt(1/4 * 9/4) = 1
  EXPECT_NEAR(B.matrix(0, 0), 1.0, B.green_err + 1e-12);
}

TEST(BirmanSchwinger, MatrixIsSymmetricPositive) {
  const auto e = laplacian(3);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 1.0}, {LatticePoint({2, 1, 0}), 0.4}, {LatticePoint({-1, 3, 2}), 2.5}});
  const auto B = bs_matrix(e, V, 0.3);
  ASSERT_EQ(B.size(), 3u);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_GT(B.matrix(i, j), 0.0);
      EXPECT_DOUBLE_EQ(B.matrix(i, j), B.matrix(j, i));
    }
  for (double mu : B.eigenvalues()) EXPECT_GT(mu, 0.0);
}

TEST(BirmanSchwinger, AgreesWithBoxCounts) {
  struct Case {
    int d;
    double rho;
    std::map<LatticePoint, double> v;
  };
  const std::vector<Case> cases = {
      {1, 0.2, {{LatticePoint({0}), 1.3}, {LatticePoint({3}), 0.9}, {LatticePoint({-4}), 2.5}}},
      {2, 0.5, {{LatticePoint({0, 0}), 3.0}, {LatticePoint({1, 1}), 2.0}, {LatticePoint({-2, 3}), 4.5}}},
      {3, 0.1, {{LatticePoint({0, 0, 0}), 4.0}, {LatticePoint({1, 0, 0}), 3.0}, {LatticePoint({0, 2, -1}), 7.0}}},
  };
  for (const auto& c : cases) {
    const auto e = laplacian(c.d);
    const auto V = from_samples(c.d, c.v);
    const auto box = n_bound_states(e, V, -c.rho);
    ASSERT_TRUE(box.stabilized);
    EXPECT_EQ(n_below_via_bs(e, V, c.rho), box.count) << "d=" << c.d;
  }
}

TEST(BirmanSchwinger, SingleSiteThresholdInThreeDimensions) {
  const auto e = laplacian(3);
  const double et = eta(e);
  for (const auto& [scale, want] : {std::pair{0.96, 0}, std::pair{1.06, 1}}) {
    const auto r = n_bound_states_bs(e, from_samples(3, {{LatticePoint({0, 0, 0}), scale * et}}));
    EXPECT_EQ(r.count, want);
    EXPECT_EQ(r.zero_lower, want);
    EXPECT_EQ(r.zero_upper, want);
  }
}

TEST(BirmanSchwinger, ZeroRhoNeedsThreeDimensions) {
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 1.0}});
  try {
    n_below_via_bs(laplacian(2), V, 0.0);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::ZeroRhoLowDimension);
  }
}

TEST(BirmanSchwinger, CountsNondecreasingAsRhoFalls) {
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 0.5}, {LatticePoint({4, 0}), 0.5}, {LatticePoint({0, 5}), 0.2}});
  const auto r = n_bound_states_bs(e, V);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_LT(r.history[i].scale, r.history[i - 1].scale);
    EXPECT_GE(r.history[i].count, r.history[i - 1].count);
  }
  EXPECT_LE(r.count, 3);
}

TEST(BirmanSchwinger, SpreadSingleSiteInTwoDimensions) {
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 0.5}});
  const auto [W, cert] = spread_rearrangement(e, V);
  EXPECT_TRUE(is_rearrangement(V, W));
  EXPECT_GT(cert.min_eig, cert.green_err);
  EXPECT_EQ(n_below_via_bs(e, W, cert.rho), 1);
}
