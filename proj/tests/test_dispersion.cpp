#include <gtest/gtest.h>

#include "latspec/dispersion.hpp"

using namespace latspec;

TEST(Dispersion, LaplacianSymbol) {
  for (int d = 1; d <= 4; ++d) {
    const auto e = laplacian(d);
    EXPECT_EQ(e.dim(), d);
    EXPECT_NEAR(e.e_max(), 2.0 * d, 1e-10);
    EXPECT_EQ(e.range(), 1);
    ASSERT_EQ(e.minima().size(), 1u);
    std::vector<double> p(d);
    Rng rng(d);
    for (int k = 0; k < 20; ++k) {
      double want = d;
      for (auto& v : p) v = rng.uniform(-kPi, kPi), want -= std::cos(v);
      EXPECT_NEAR(e(p), want, 1e-12);
    }
  }
}

TEST(Dispersion, NormalizesMinimumToZero) {
  // 5 - 2 cos p + 0.4 cos 2p, minimum at p = 0
  const auto e = make_dispersion({{LatticePoint({0}), 5.0},
                                  {LatticePoint({1}), -1.0},
                                  {LatticePoint({-1}), -1.0},
                                  {LatticePoint({2}), 0.2},
                                  {LatticePoint({-2}), 0.2}});
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double p = -kPi + 2 * kPi * i / 20000.0;
    lo = std::min(lo, e.eval({p}));
    hi = std::max(hi, e.eval({p}));
  }
  EXPECT_NEAR(lo, 0.0, 1e-9);
  EXPECT_NEAR(hi, e.e_max(), 1e-7);
  EXPECT_EQ(e.range(), 2);
}

TEST(Dispersion, RejectsAsymmetricCoefficients) {
  try {
    make_dispersion({{LatticePoint({0}), 1.0}, {LatticePoint({1}), -0.5}});
    FAIL() << "expected an error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::AsymmetricCoefficients);
  }
}

TEST(Dispersion, RejectsDegenerateMinimum) {
  // (1 - cos p)^2 has a quartic minimum at 0
  EXPECT_THROW(make_dispersion({{LatticePoint({0}), 1.5},
                                {LatticePoint({1}), -1.0},
                                {LatticePoint({-1}), -1.0},
                                {LatticePoint({2}), 0.25},
                                {LatticePoint({-2}), 0.25}}),
               Error);
}

TEST(Dispersion, TwoMinima) {
  // 1 - cos 2p vanishes at 0 and pi
  const auto e = make_dispersion({{LatticePoint({0}), 1.0}, {LatticePoint({2}), -0.5}, {LatticePoint({-2}), -0.5}});
  EXPECT_EQ(e.minima().size(), 2u);
  EXPECT_NEAR(e.e_max(), 2.0, 1e-10);
}

TEST(Dispersion, ScalingAndJson) {
  const auto e = laplacian(2);
  EXPECT_NEAR(e.scaled(2.5).e_max(), 10.0, 1e-10);
  const auto f = dispersion_from_json(e.to_json());
  EXPECT_EQ(f.id(), e.id());
  EXPECT_NEAR(f.eval({0.3, -1.2}), e.eval({0.3, -1.2}), 1e-14);
}

TEST(Dispersion, MorseCurvatureOfLaplacian) {
  // Hessian at the minimum is the identity, so the minimal curvature is 1
  const auto& m = laplacian(3).morse();
  EXPECT_EQ(m.n_min, 1);
  EXPECT_NEAR(m.k_min, 1.0, 1e-6);
}
