#include <gtest/gtest.h>

#include <cstdlib>

#include "latspec/config.hpp"

using namespace latspec;

TEST(Harness, StaircaseCountsLevels) {
  const std::vector<double> lam{1, 2, 2, 5};
  EXPECT_EQ(staircase(lam, 0.5), 0);
  EXPECT_EQ(staircase(lam, 2.0), 3);
  EXPECT_EQ(staircase(lam, 4.9), 3);
  EXPECT_EQ(staircase(lam, 5.0), 4);
}

TEST(Harness, LambdaGrid) {
  const auto g = lambdas_from_config({{"from", 1}, {"to", 100}, {"per_decade", 2}});
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[0], 1);
  EXPECT_NEAR(g[1], std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(g[4], 100, 1e-9);
  EXPECT_EQ(lambdas_from_config(nlohmann::json::array({3, 1})), (std::vector<double>{3, 1}));
}

TEST(Harness, RandomSuiteIsSeeded) {
  const auto e = laplacian(2);
  SuiteSpec s;
  s.dim = 2;
  s.seed = 42;
  const auto a = random_suite(e, s), b = random_suite(e, s);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].to_json(), b[i].to_json());
    for (const auto& x : a[i].support()) {
      EXPECT_LE(x.norm(), 6.0);
      EXPECT_GT(a[i](x), 0.0);
      EXPECT_LE(a[i](x), 3 * e.e_max());
    }
  }
  s.seed = 43;
  EXPECT_NE(random_suite(e, s)[0].to_json(), a[0].to_json());
}

TEST(Harness, SweepCsvIndependentOfWorkers) {
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 0.8}, {LatticePoint({3, 1}), 1.7}});
  const std::vector<double> lam{0.5, 2, 8};
  setenv("NUM_THREADS", "1", 1);
  const auto a = weyl_sweep(e, V, lam).to_csv();
  setenv("NUM_THREADS", "3", 1);
  const auto b = weyl_sweep(e, V, lam).to_csv();
  unsetenv("NUM_THREADS");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), SweepReport::kHeader);
}

TEST(Harness, SweepRatiosBracketTheCount) {
  const auto e = laplacian(3);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 2.0}, {LatticePoint({2, 0, 0}), 3.0}});
  for (const auto& r : weyl_sweep(e, V, {1, 4, 16}).rows) {
    EXPECT_LE(r.ratio_lo, r.ratio_hi);
    EXPECT_TRUE(r.n_bs.has_value());
    EXPECT_EQ(*r.n_bs, r.n_box.count);
  }
}

TEST(Harness, BoundStatesBracket) {
  const auto e = laplacian(3);
  const auto V = from_samples(3, {{LatticePoint({0, 0, 0}), 2.5}, {LatticePoint({5, 0, 0}), 0.3}});
  const auto b = bound_states(e, V);
  ASSERT_TRUE(b.upper.has_value());
  EXPECT_LE(b.lower, b.count);
  EXPECT_LE(b.count, *b.upper);
  EXPECT_EQ(b.count, 1);
}

TEST(Harness, CheckOutcomesOnSmallCases) {
  const auto e = laplacian(2);
  const auto V = from_samples(2, {{LatticePoint({0, 0}), 5.0}, {LatticePoint({1, 0}), 4.2}, {LatticePoint({6, 6}), 0.1}});
  const auto lo = check_lower_bound(e, V, 1.01 * e.e_max());
  EXPECT_EQ(lo.status(), "pass");
  EXPECT_EQ(check_d12_saturation(e, Potential(2)).status(), "pass");
  EXPECT_EQ(accumulation_probe(laplacian(3), 2.0, 1.0, {4, 8, 16}).status(), "premise-fail");
}

TEST(Harness, ConfigDispatch) {
  const auto c = config_from_json(nlohmann::json::parse(R"({
    "dispersion": {"laplacian": 1},
    "potential": {"explicit": [{"x": [0], "v": 0.3}, {"x": [1], "v": 0.3}]},
    "seed": 9
  })"));
  EXPECT_EQ(c.V->dim(), 1);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(run_check("d12_saturation", c).status(), "pass");
  EXPECT_THROW(run_check("liminf_limsup", c), Error);
  EXPECT_THROW(run_check("no_such_check", c), Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"dispersion": {"laplacian": 2},
    "potential": {"dim": 3, "explicit": []}})")),
               Error);
}

TEST(Harness, LowDimensionalUpperFitHoldsOut) {
  for (int d : {1, 2})
    for (int seed : {2, 7}) {
      const auto c = config_from_json({{"dispersion", {{"laplacian", d}}}, {"seed", seed}, {"check", {{"held_count", 20}}}});
      const auto o = run_check("d12_upper", c);
      EXPECT_EQ(o.status(), "pass") << d << " " << seed;
      EXPECT_GT(o.details["c_hat"].get<double>(), 0.0);
    }
}

TEST(Harness, ParallelForPropagatesLowestError) {
  std::vector<int> out(50, 0);
  try {
    parallel_for(out.size(), [&](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
      out[i] = 1;
    });
    FAIL();
  } catch (const std::runtime_error& ex) {
    EXPECT_STREQ(ex.what(), "7");
  }
  EXPECT_EQ(out[49], 1);
}
