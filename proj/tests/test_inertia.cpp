#include <gtest/gtest.h>

#include "latspec/boxop.hpp"

using namespace latspec;

namespace {

Potential random_potential(int d, Coord r, int n, std::uint64_t seed, double scale) {
  Rng rng(seed);
  std::map<LatticePoint, double> m;
  for (int k = 0; k < n; ++k) {
    LatticePoint x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.integer(-r, r);
    m[x] = scale * rng.uniform();
  }
  return from_samples(d, m);
}

std::int64_t eigen_count(const BoxOperator& H, double t) {
  const auto n = static_cast<Eigen::Index>(H.size());
  auto a = H.matrix.dense(0.0);
  const Eigen::Map<Eigen::MatrixXd> m(a.data(), n, n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::int64_t c = 0;
  for (Eigen::Index i = 0; i < n; ++i) c += es.eigenvalues()[i] < t;
  return c;
}

}  // namespace

TEST(Inertia, SturmCountMatchesEigenvalues) {
  Rng rng(3);
  const int n = 60;
  std::vector<double> a(n), b(n - 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) T(i, i) = a[i] = rng.uniform(-2, 2);
  for (int i = 0; i + 1 < n; ++i) T(i, i + 1) = T(i + 1, i) = b[i] = rng.uniform(-1, 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  for (double t : {-2.5, -1.0, -0.1, 0.3, 1.7, 3.5}) {
    std::int64_t want = 0;
    for (int i = 0; i < n; ++i) want += es.eigenvalues()[i] < t;
    EXPECT_EQ(sturm_count(a, b, t, 4.0), want) << t;
  }
}

// Dense Bunch-Kaufman path (small boxes) and the nested-dissection path (large boxes).
TEST(Inertia, BoxCountsMatchEigenvalues) {
  struct Case {
    int d;
    Coord L;
  };
  for (const auto& c : {Case{2, 8}, Case{3, 4}, Case{2, 22}, Case{3, 6}}) {
    const auto e = laplacian(c.d);
    const auto V = random_potential(c.d, c.L, 12, 17 + c.L, 3 * e.e_max());
    const auto H = assemble(e, V, c.L);
    for (double t : {-3.0, -0.7, -0.05, 0.4, 1.9}) EXPECT_EQ(count_below(H, t), eigen_count(H, t)) << c.d << " " << c.L << " " << t;
  }
}

TEST(Inertia, SymmetricBoxUsesSectorsConsistently) {
  const auto e = laplacian(3);
  // reflection-symmetric potential: a single site at the origin
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 4.0}});
  const auto H = assemble(e, V, 6);
  EXPECT_TRUE(H.reflection_symmetric);
  for (double t : {-1.0, 0.05, 0.5}) EXPECT_EQ(count_below(H, t), eigen_count(H, t)) << t;
}
