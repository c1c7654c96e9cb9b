#include <gtest/gtest.h>

#include "latspec/potential.hpp"

using namespace latspec;

namespace {

std::int64_t brute_ball(int d, std::int64_t n2) {
  const Coord r = static_cast<Coord>(std::sqrt(static_cast<double>(n2))) + 1;
  std::int64_t c = 0;
  for_each_in_cube(d, r, [&](const LatticePoint& x) { c += x.norm2() <= static_cast<double>(n2); });
  return c;
}

}  // namespace

TEST(Potential, BallCountMatchesEnumeration) {
  for (int d = 1; d <= 3; ++d)
    for (std::int64_t n2 : {0, 1, 2, 3, 5, 10, 26, 50}) EXPECT_EQ(ball_count(d, n2), brute_ball(d, n2)) << d << " " << n2;
}

TEST(Potential, PowerTailLevelCountMatchesEnumeration) {
  const auto V = from_tail(3, Tail::power(5, 1.5), 0);
  for (double a : {0.2, 0.5, 1.0, 2.0}) {
    std::int64_t c = 0;
    for_each_in_cube(3, 40, [&](const LatticePoint& x) { c += V(x) >= a; });
    EXPECT_EQ(level_count(V, a), c) << a;
  }
  EXPECT_THROW(level_count(V, 0.0), Error);
}

TEST(Potential, Rearrangement) {
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 1.0}, {LatticePoint({1, 0}), 2.0}, {LatticePoint({3, 3}), 0.5}});
  EXPECT_TRUE(is_rearrangement(V, translated(V, LatticePoint({-4, 7}))));
  const auto W = from_samples(2, {{LatticePoint({0, 0}), 2.0}, {LatticePoint({5, 0}), 1.0}, {LatticePoint({0, 9}), 0.5}});
  EXPECT_TRUE(is_rearrangement(V, W));
  const auto U = from_samples(2, {{LatticePoint({0, 0}), 2.0}, {LatticePoint({5, 0}), 1.0}, {LatticePoint({0, 9}), 0.6}});
  EXPECT_FALSE(is_rearrangement(V, U));
}

TEST(Potential, SparseChainGeometry) {
  const auto pts = sparse_chain(3, 4, 3);
  ASSERT_EQ(pts.size(), 4u);
  Coord r = 3;
  for (const auto& x : pts) {
    EXPECT_EQ(x, LatticePoint::unit(3, 0, r));
    r *= 9;
  }
  EXPECT_THROW(sparse_chain(1, 40, 3), Error);
}

TEST(Potential, PrescribedValues) {
  const std::vector<double> lam{1, 2, 2, 5};
  const auto V = build_prescribed(lam, 2.0, 4, 3);
  EXPECT_EQ(V.support_size(), 4u);
  EXPECT_EQ(level_count(V, 2.0), 1);
  EXPECT_EQ(level_count(V, 1.0), 3);
  EXPECT_EQ(level_count(V, 0.4), 4);
  EXPECT_THROW(build_prescribed({2, 1}, 2.0, 4, 3), Error);
}

TEST(Potential, ScalingAndJsonRoundTrip) {
  auto V = from_samples(3, {{LatticePoint({0, 1, 2}), 1.25}, {LatticePoint({-3, 0, 0}), 0.5}});
  const auto W = V.scaled(4);
  EXPECT_DOUBLE_EQ(W(LatticePoint({0, 1, 2})), 5.0);
  const auto R = potential_from_json(W.to_json());
  EXPECT_EQ(R.to_json(), W.to_json());
  const auto T = from_tail(2, Tail::exp(2, 0.5), 3);
  EXPECT_EQ(potential_from_json(T.to_json()).to_json(), T.to_json());
  EXPECT_DOUBLE_EQ(T(LatticePoint({10, 0})), 2 * std::exp(-5.0));
}

TEST(Potential, InterleaveSelectsBands) {
  const auto a = from_samples(1, {{LatticePoint({0}), 1.0}, {LatticePoint({5}), 1.0}, {LatticePoint({9}), 1.0}});
  const auto b = from_samples(1, {{LatticePoint({0}), 2.0}, {LatticePoint({5}), 2.0}, {LatticePoint({9}), 2.0}});
  const auto v = interleave(a, b, {4, 6});
  EXPECT_DOUBLE_EQ(v(LatticePoint({0})), 2.0);
  EXPECT_DOUBLE_EQ(v(LatticePoint({5})), 1.0);
  EXPECT_DOUBLE_EQ(v(LatticePoint({9})), 2.0);
}
