#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "isomed/isotonic.hpp"
#include "test_util.hpp"

using isomed::Block;
using isomed::combined_mean;
using isomed::IsotonicFit;
using isomed::oracle_fit;
using isomed::pava_fit;
using isomed::sdmmsa_fit;
using isomed::WeightedMeans;
using Catch::Matchers::WithinAbs;

namespace {

void require_same_fit(const IsotonicFit& a, const IsotonicFit& b, double tol = 1e-10) {
  REQUIRE(a.fitted.size() == b.fitted.size());
  for (std::size_t i = 0; i < a.fitted.size(); ++i)
    REQUIRE_THAT(a.fitted[i], WithinAbs(b.fitted[i], tol));
}

const std::vector<double> kTable1Fitted{23.9, 27.7, 33.4, 40.5, 57.9,
                                        221.3 / 3, 221.3 / 3, 221.3 / 3, 76.2};

}  // namespace

TEST_CASE("combined_mean pools groups six through eight of the example data") {
  const WeightedMeans wm = isomed::test::table1_means();
  REQUIRE_THAT(combined_mean(wm, 6, 8), WithinAbs(221.3 / 3, 1e-12));
  REQUIRE_THAT(combined_mean(wm, 6, 8), WithinAbs(73.77, 5e-3));
}

TEST_CASE("combined_mean of a single group returns the group mean") {
  const WeightedMeans wm = isomed::test::table1_means();
  for (int i = 1; i <= wm.size(); ++i) REQUIRE(combined_mean(wm, i, i) == wm.means[i - 1]);
}

TEST_CASE("combined_mean weights by sample size") {
  REQUIRE(combined_mean({{1.0, 3.0}, {1.0, 3.0}}, 1, 2) == 2.5);
}

TEST_CASE("combined_mean rejects bad index ranges") {
  const WeightedMeans wm{{1.0, 2.0}, {1.0, 1.0}};
  REQUIRE_THROWS_AS(combined_mean(wm, 2, 1), isomed::ArgumentError);
  REQUIRE_THROWS_AS(combined_mean(wm, 0, 1), isomed::ArgumentError);
  REQUIRE_THROWS_AS(combined_mean(wm, 1, 3), isomed::ArgumentError);
}

TEST_CASE("WeightedMeans validation") {
  REQUIRE_THROWS_AS(sdmmsa_fit({{}, {}}), isomed::ArgumentError);
  REQUIRE_THROWS_AS(sdmmsa_fit({{1.0}, {1.0, 2.0}}), isomed::ArgumentError);
  REQUIRE_THROWS_AS(sdmmsa_fit({{1.0}, {0.0}}), isomed::ArgumentError);
  REQUIRE_THROWS_AS(sdmmsa_fit({{1.0}, {-2.0}}), isomed::ArgumentError);
}

TEST_CASE("sdmmsa_fit reproduces the example fit and partition") {
  const IsotonicFit fit = sdmmsa_fit(isomed::test::table1_means());
  for (std::size_t i = 0; i < 9; ++i)
    REQUIRE_THAT(fit.fitted[i], WithinAbs(kTable1Fitted[i], 1e-10));

  const std::vector<Block> expected{{9, 9}, {6, 8}, {5, 5}, {4, 4}, {3, 3}, {2, 2}, {1, 1}};
  REQUIRE(fit.blocks == expected);
  REQUIRE_THAT(fit.block_means[1], WithinAbs(221.3 / 3, 1e-12));

  const std::vector<Block> ltr = fit.blocks_left_to_right();
  REQUIRE(ltr.front() == Block{1, 1});
  REQUIRE(ltr.back() == Block{9, 9});
  REQUIRE(fit.block_ordinal(1) == 1);
  REQUIRE(fit.block_ordinal(7) == 6);
  REQUIRE(fit.block_ordinal(9) == 7);
}

TEST_CASE("sdmmsa_fit is the identity on nondecreasing input") {
  const WeightedMeans wm{{-3.0, -1.0, 0.5, 0.5, 2.25}, {2.0, 1.0, 4.0, 1.0, 3.0}};
  const IsotonicFit fit = sdmmsa_fit(wm);
  REQUIRE(fit.fitted == wm.means);
  // the tied pair collapses into one block; strictly increasing values stay single
  REQUIRE(fit.blocks_left_to_right() ==
          std::vector<Block>{{1, 1}, {2, 2}, {3, 4}, {5, 5}});
}

TEST_CASE("sdmmsa_fit pools a forced two-point violation") {
  const IsotonicFit fit = sdmmsa_fit({{3.0, 1.0}, {1.0, 1.0}});
  REQUIRE(fit.fitted == std::vector<double>{2.0, 2.0});
  REQUIRE(fit.blocks == std::vector<Block>{{1, 2}});
}

TEST_CASE("pava_fit matches sdmmsa_fit on the example data") {
  require_same_fit(pava_fit(isomed::test::table1_means()),
                   sdmmsa_fit(isomed::test::table1_means()));
}

TEST_CASE("pava_fit is the identity on nondecreasing input") {
  const WeightedMeans wm{{1.0, 1.0, 2.0}, {1.0, 5.0, 2.0}};
  REQUIRE(pava_fit(wm).fitted == wm.means);
}

TEST_CASE("pava_fit pools a strictly decreasing triple") {
  // frozen from oracle_fit: the only feasible partition is one block of mean 4
  const IsotonicFit fit = pava_fit({{5.0, 4.0, 3.0}, {1.0, 1.0, 1.0}});
  REQUIRE(fit.fitted == std::vector<double>{4.0, 4.0, 4.0});
  require_same_fit(fit, oracle_fit({{5.0, 4.0, 3.0}, {1.0, 1.0, 1.0}}));
}

TEST_CASE("oracle_fit handles the trivial and weighted two-point cases") {
  REQUIRE(oracle_fit({{7.25}, {3.0}}).fitted == std::vector<double>{7.25});
  // SSE comparison: {[1],[2]} is infeasible (3 > 1), {[1,2]} has mean 1.5
  const IsotonicFit fit = oracle_fit({{3.0, 1.0}, {1.0, 3.0}});
  REQUIRE_THAT(fit.fitted[0], WithinAbs(1.5, 1e-12));
  REQUIRE_THAT(fit.fitted[1], WithinAbs(1.5, 1e-12));
}

TEST_CASE("oracle_fit matches sdmmsa_fit on the example data") {
  require_same_fit(oracle_fit(isomed::test::table1_means()),
                   sdmmsa_fit(isomed::test::table1_means()));
}

TEST_CASE("oracle_fit rejects k beyond the enumeration limit") {
  WeightedMeans wm;
  for (int i = 0; i < 21; ++i) {
    wm.means.push_back(i);
    wm.weights.push_back(1.0);
  }
  REQUIRE_THROWS_AS(oracle_fit(wm), isomed::CapacityError);
}

TEST_CASE("three-way equivalence on random instances") {
  std::mt19937_64 gen(991);
  for (int trial = 0; trial < 400; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const IsotonicFit a = sdmmsa_fit(wm);
    require_same_fit(a, pava_fit(wm));
    require_same_fit(a, oracle_fit(wm));
  }
}

TEST_CASE("fit output is nondecreasing and conserves weighted mass") {
  std::mt19937_64 gen(992);
  for (int trial = 0; trial < 200; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const IsotonicFit fit = sdmmsa_fit(wm);
    isomed::detail::CompensatedSum raw, fitted;
    for (int i = 0; i < wm.size(); ++i) {
      if (i + 1 < wm.size()) REQUIRE(fit.fitted[i] <= fit.fitted[i + 1]);
      raw.add(wm.weights[i] * wm.means[i]);
      fitted.add(wm.weights[i] * fit.fitted[i]);
    }
    REQUIRE_THAT(fitted.value(), WithinAbs(raw.value(), 1e-9));
  }
}

TEST_CASE("fitting a fitted vector is the identity") {
  std::mt19937_64 gen(993);
  for (int trial = 0; trial < 200; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const IsotonicFit once = sdmmsa_fit(wm);
    const IsotonicFit twice = sdmmsa_fit({once.fitted, wm.weights});
    REQUIRE(twice.fitted == once.fitted);
  }
}

TEST_CASE("raising one raw mean never lowers any fitted value") {
  std::mt19937_64 gen(994);
  const double bumps[] = {0.001, 0.1, 10.0};
  for (int trial = 0; trial < 150; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const IsotonicFit base = sdmmsa_fit(wm);
    for (int j = 0; j < wm.size(); ++j) {
      for (double bump : bumps) {
        WeightedMeans bumped = wm;
        bumped.means[j] += bump;
        const IsotonicFit fit = sdmmsa_fit(bumped);
        for (int i = 0; i < wm.size(); ++i)
          REQUIRE(fit.fitted[i] >= base.fitted[i] - 1e-12);
      }
    }
  }
}

TEST_CASE("the raw means step strictly upward across block boundaries") {
  std::mt19937_64 gen(995);
  for (int trial = 0; trial < 300; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const IsotonicFit fit = sdmmsa_fit(wm);
    // blocks are in discovery order: block u+1 sits immediately left of block u
    for (std::size_t u = 0; u + 1 < fit.blocks.size(); ++u) {
      const int boundary = fit.blocks[u].lo;  // == blocks[u+1].hi + 1
      REQUIRE(fit.blocks[u + 1].hi == boundary - 1);
      REQUIRE(wm.means[boundary - 2] < wm.means[boundary - 1]);
    }
  }
}

TEST_CASE("residuals vanish within blocks and the fit is the cone projection") {
  std::mt19937_64 gen(996);
  std::uniform_real_distribution<double> step(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const IsotonicFit fit = sdmmsa_fit(wm);
    for (std::size_t u = 0; u < fit.blocks.size(); ++u) {
      isomed::detail::CompensatedSum resid;
      for (int i = fit.blocks[u].lo; i <= fit.blocks[u].hi; ++i)
        resid.add(wm.weights[i - 1] * (wm.means[i - 1] - fit.fitted[i - 1]));
      REQUIRE_THAT(resid.value(), WithinAbs(0.0, 1e-9));
    }
    // projection inequality against a random feasible nondecreasing v
    std::vector<double> v(wm.size());
    double level = -15.0;
    for (int i = 0; i < wm.size(); ++i) {
      level += step(gen);
      v[i] = level;
    }
    double inner = 0.0;
    for (int i = 0; i < wm.size(); ++i)
      inner += wm.weights[i] * (wm.means[i] - fit.fitted[i]) * (fit.fitted[i] - v[i]);
    REQUIRE(inner >= -1e-9);
  }
}

TEST_CASE("fit commutes with positive affine maps") {
  std::mt19937_64 gen(997);
  for (int trial = 0; trial < 100; ++trial) {
    const WeightedMeans wm = isomed::test::random_instance(gen);
    const double c = 2.5, d = -7.75;
    WeightedMeans scaled = wm;
    for (auto& m : scaled.means) m = c * m + d;
    const IsotonicFit base = sdmmsa_fit(wm);
    const IsotonicFit mapped = sdmmsa_fit(scaled);
    for (int i = 0; i < wm.size(); ++i)
      REQUIRE_THAT(mapped.fitted[i], WithinAbs(c * base.fitted[i] + d, 1e-9));
    REQUIRE(mapped.blocks == base.blocks);
  }
}
