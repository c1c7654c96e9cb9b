#include <gtest/gtest.h>

#include <sstream>

#include "latspec/boxop.hpp"

using namespace latspec;

TEST(BoxOperator, OneDimensionalBoundState) {
  // 1 - cos p with 0.75 delta_0: bound state at exactly -1/4
  const auto e = laplacian(1);
  const auto V = from_samples(1, {{LatticePoint({0}), 0.75}});
  const auto H = assemble(e, V, 64);
  EXPECT_EQ(count_below(H, -1e-10), 1);
  const auto ev = lowest_eigenvalues(H, 2);
  EXPECT_NEAR(ev[0], -0.25, 1e-10);
  EXPECT_GT(ev[1], 0.0);
}

TEST(BoxOperator, TripletsAreSymmetric) {
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({1, 0}), 0.5}});
  const auto H = assemble(e, V, 2);
  std::map<std::pair<long, long>, double> m;
  std::istringstream in(H.to_triplets());
  long i, j;
  double v;
  while (in >> i >> j >> v) m[{i, j}] = v;
  for (const auto& [ij, val] : m) EXPECT_DOUBLE_EQ(m.at({ij.second, ij.first}), val);
  EXPECT_DOUBLE_EQ(H.diagonal(LatticePoint({1, 0})), 2.0 - 0.5);
  EXPECT_DOUBLE_EQ(H.diagonal(LatticePoint({0, 0})), 2.0);
  EXPECT_EQ(H.size(), 25u);
}

TEST(BoxOperator, CountsGrowWithBox) {
  // restriction to a larger box can only add negative eigenvalues
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 0.6}, {LatticePoint({2, 1}), 0.9}, {LatticePoint({-1, 3}), 0.3}});
  std::int64_t prev = 0;
  for (Coord L : {3, 6, 12, 24, 48}) {
    const auto c = count_below(assemble(e, V, L), -1e-10);
    EXPECT_GE(c, prev) << L;
    prev = c;
  }
  EXPECT_GE(prev, 1);  // d = 2: any nonzero V >= 0 binds
}

TEST(BoxOperator, ZeroPotentialAndTranslation) {
  const auto e = laplacian(3);
  EXPECT_EQ(n_bound_states(e, Potential(3)).count, 0);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 5.0}, {LatticePoint({1, 0, 0}), 3.0}});
  const auto a = n_bound_states(e, V);
  const auto b = n_bound_states(e, translated(V, LatticePoint({2, -1, 1})));
  EXPECT_TRUE(a.stabilized);
  EXPECT_EQ(a.count, b.count);
}

TEST(BoxOperator, LargeCouplingBindsEverySite) {
  const auto e = laplacian(3);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 40.0}, {LatticePoint({3, 0, 0}), 50.0}, {LatticePoint({0, 2, 2}), 60.0}});
  EXPECT_EQ(n_bound_states(e, V).count, 3);
}
