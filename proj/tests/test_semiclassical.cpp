#include <gtest/gtest.h>

#include "latspec/semiclassical.hpp"

using namespace latspec;

TEST(Semiclassical, OneDimensionalSublevelVolume) {
  // mu{1 - cos p < t} = arccos(1 - t) / pi
  const auto e = laplacian(1);
  for (double t : {0.05, 0.3, 1.0, 1.7}) {
    const auto b = sublevel_volume(e, t);
    const double want = std::acos(1 - t) / kPi;
    EXPECT_LE(b.lower, want + 1e-12) << t;
    EXPECT_GE(b.upper, want - 1e-12) << t;
    EXPECT_LT(b.width(), 1e-2);
  }
  EXPECT_EQ(sublevel_volume(e, 2.5).lower, 1.0);
  EXPECT_EQ(sublevel_volume(e, 0.0).upper, 0.0);
}

TEST(Semiclassical, SublevelVolumeMonotone) {
  const auto e = laplacian(3);
  double prev = 0;
  for (double t = 0.25; t < 6; t += 0.5) {
    const auto b = sublevel_volume(e, t);
    EXPECT_GE(b.upper, prev);
    EXPECT_LE(b.lower, b.upper);
    prev = b.lower;
  }
  // e is symmetric about e_max / 2 on the cube
  const auto h = sublevel_volume(e, 3.0);
  EXPECT_LE(h.lower, 0.5);
  EXPECT_GE(h.upper, 0.5);
}

TEST(Semiclassical, SitesAboveBandTopCountOnce) {
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 4.5}, {LatticePoint({7, 1}), 9.0}, {LatticePoint({2, 2}), 100.0}});
  const auto b = n_sc(e, V);
  EXPECT_DOUBLE_EQ(b.lower, 3.0);
  EXPECT_DOUBLE_EQ(b.upper, 3.0);
  EXPECT_EQ(n_sc_split(e, V).n_gt, 3);
}

TEST(Semiclassical, InvariantUnderRearrangement) {
  const auto e = laplacian(3);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 1.0}, {LatticePoint({1, 0, 0}), 2.0}, {LatticePoint({0, 0, 4}), 7.0}});
  const auto W = from_samples(3, {{LatticePoint({9, 0, 0}), 1.0}, {LatticePoint({0, -3, 0}), 2.0}, {LatticePoint({5, 5, 5}), 7.0}});
  const auto a = n_sc(e, V), b = n_sc(e, W);
  EXPECT_DOUBLE_EQ(a.lower, b.lower);
  EXPECT_DOUBLE_EQ(a.upper, b.upper);
}

TEST(Semiclassical, MonotoneInCoupling) {
  const auto e = laplacian(3);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 0.4}, {LatticePoint({3, 0, 0}), 1.1}});
  double prev = 0;
  for (double lam : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto b = n_sc(e, V.scaled(lam));
    EXPECT_GE(b.upper, prev);
    prev = b.lower;
  }
}

TEST(Semiclassical, ClrConstantDominatesSmallCouplings) {
  // the trace criterion must cover any single site below the band top
  const auto e = laplacian(3);
  const auto& k = default_clr(e);
  EXPECT_GT(k.clr_total, 0.0);
  EXPECT_GE(k.clr_total, k.clr_c);
  EXPECT_THROW(clr_constant(laplacian(2)), Error);
}
