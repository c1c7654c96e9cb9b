#include <gtest/gtest.h>

#include "latspec/green.hpp"

using namespace latspec;

// 1 - cos p: G_rho(x) = z^|x| / sqrt(rho (rho + 2)), z = 1 + rho - sqrt(rho (rho + 2)).
TEST(Green, OneDimensionalClosedForm) {
  const auto e = laplacian(1);
  for (double rho : {0.01, 0.25, 1.0, 3.0}) {
    const double s = std::sqrt(rho * (rho + 2)), z = 1 + rho - s;
    for (int x : {0, 1, 2, 5, 17}) {
      const auto g = green_value(e, rho, LatticePoint({x}));
      EXPECT_NEAR(g.value, std::pow(z, x) / s, g.err + 1e-10) << "rho " << rho << " x " << x;
    }
  }
}

// Square lattice: G_rho(0) = 2 K(k) / (pi (2 + rho)), k = 2 / (2 + rho).
TEST(Green, SquareLatticeDiagonal) {
  const auto e = laplacian(2);
  for (double rho : {0.05, 0.5, 2.0}) {
    const double want = 2 * std::comp_ellint_1(2 / (2 + rho)) / (kPi * (2 + rho));
    const auto g = green_value(e, rho, LatticePoint({0, 0}));
    EXPECT_NEAR(g.value, want, std::max(g.err, 1e-9)) << rho;
  }
}

TEST(Green, CubicLatticeAtZeroEnergy) {
  const auto e = laplacian(3);
  const auto g = green_value(e, 0.0, LatticePoint({0, 0, 0}));
  EXPECT_NEAR(g.value, watson_integral(), 1e-5);
  EXPECT_NEAR(1 / eta(e), watson_integral(), 1e-5);
}

TEST(Green, MonotoneInDistanceAndRho) {
  const auto e = laplacian(3);
  double prev = 1e300;
  for (int x = 0; x <= 6; ++x) {
    const double g = green_value(e, 0.1, LatticePoint({x, 0, 0})).value;
    EXPECT_LT(g, prev);
    prev = g;
  }
  EXPECT_GT(green_value(e, 0.1, LatticePoint({1, 1, 0})).value, green_value(e, 0.5, LatticePoint({1, 1, 0})).value);
}

TEST(Green, LowDimensionalEtaAndZeroEnergy) {
  EXPECT_EQ(eta(laplacian(1)), 0.0);
  EXPECT_EQ(eta(laplacian(2)), 0.0);
  try {
    green_value(laplacian(2), 0.0, LatticePoint({0, 0}));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::ZeroRhoLowDimension);
  }
}

TEST(Green, WatsonConstant) {
  // simple cubic Watson integral, 1.516386... / 3
  EXPECT_NEAR(3 * watson_integral(), 1.5163860591519780, 1e-12);
}
