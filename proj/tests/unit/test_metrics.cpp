#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "../support/oracles.hpp"
#include "rarepred/metrics.hpp"
#include "rarepred/random.hpp"

using namespace rarepred;

namespace {

std::vector<ScoredPair> pairs_of(std::vector<double> s, std::vector<int> y) { return make_pairs(s, y); }

std::vector<ScoredPair> random_pairs(RngStream& rng) {
  const std::size_t n = 2 + rng.uniform_index(199);
  const std::size_t levels = 1 + rng.uniform_index(20);
  std::vector<double> s;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    // Coarse levels force ties.
    s.push_back(rng.uniform01() < 0.5 ? static_cast<double>(rng.uniform_index(levels)) / levels : rng.uniform01());
    y.push_back(i == 0 ? 1 : i == 1 ? 0 : rng.uniform01() < 0.3);
  }
  return make_pairs(s, y);
}

}  // namespace

TEST(Confusion, CountsAtThreshold) {
  const auto p = pairs_of({0.9, 0.8, 0.3, 0.1}, {1, 0, 1, 0});
  EXPECT_EQ(confusion(p, 0.5), (Confusion{1, 1, 1, 1}));
  EXPECT_EQ(confusion(p, 0.8), (Confusion{1, 1, 1, 1}));
  EXPECT_EQ(confusion(p, 0.0), (Confusion{2, 2, 0, 0}));
  const auto ss = sens_spec(Confusion{3, 1, 9, 1});
  EXPECT_DOUBLE_EQ(ss.sensitivity, 0.75);
  EXPECT_DOUBLE_EQ(ss.specificity, 0.9);
  EXPECT_TRUE(sens_spec(Confusion{0, 1, 1, 0}).sensitivity_degenerate);
}

TEST(Roc, Vertices) {
  const auto curve = roc(pairs_of({0.9, 0.8, 0.8, 0.1}, {1, 1, 0, 0}));
  ASSERT_EQ(curve.size(), 4u);
  EXPECT_TRUE(std::isinf(curve.thresholds[0]));
  EXPECT_EQ(curve.fpr, (std::vector<double>{0, 0, 0.5, 1}));
  EXPECT_EQ(curve.tpr, (std::vector<double>{0, 0.5, 1, 1}));
  EXPECT_DOUBLE_EQ(auc(curve), 0.875);
}

TEST(Auc, KnownValues) {
  EXPECT_EQ(auc(pairs_of({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0})), 1.0);
  EXPECT_EQ(auc(pairs_of({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0})), 0.0);
  EXPECT_EQ(auc(pairs_of({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0})), 0.5);
}

TEST(Auc, NeedsBothClasses) {
  EXPECT_THROW(auc(pairs_of({0.1, 0.2}, {1, 1})), std::exception);
}

TEST(Auc, MatchesMannWhitney) {
  RngStream rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const auto p = random_pairs(rng);
    EXPECT_NEAR(auc(p), oracle::mann_whitney(p), 1e-12);
  }
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  RngStream rng(18);
  for (int rep = 0; rep < 100; ++rep) {
    auto p = random_pairs(rng);
    const double a = auc(p);
    for (auto& x : p) x.score = std::exp(3.0 * x.score) - 7.0;
    EXPECT_NEAR(auc(p), a, 1e-12);
  }
}

TEST(Peirce, KnownValues) {
  const auto r = peirce(pairs_of({0.9, 0.8, 0.3, 0.1}, {1, 0, 1, 0}));
  EXPECT_DOUBLE_EQ(r.index, 0.5);
  const auto perfect = peirce(pairs_of({0.9, 0.7, 0.2}, {1, 1, 0}));
  EXPECT_DOUBLE_EQ(perfect.index, 1.0);
  EXPECT_DOUBLE_EQ(perfect.gamma_star, 0.7);
  EXPECT_DOUBLE_EQ(perfect.sensitivity, 1.0);
  EXPECT_DOUBLE_EQ(perfect.specificity, 1.0);
}

TEST(Peirce, MatchesExhaustiveSweepAndDistance) {
  RngStream rng(19);
  for (int rep = 0; rep < 300; ++rep) {
    const auto p = random_pairs(rng);
    const auto r = peirce(p);
    const auto o = oracle::exhaustive_peirce(p);
    EXPECT_NEAR(r.index, o.index, 1e-12);
    if (o.index > 0.0) EXPECT_EQ(r.gamma_star, o.gamma);
    EXPECT_NEAR(r.index, 1.0 - min_manhattan_distance(roc(p)), 1e-12);
    EXPECT_GE(r.index, 0.0);
    EXPECT_LE(r.index, 1.0);
  }
}

TEST(Roc, CsvHeader) {
  std::ostringstream out;
  write_roc_csv(out, roc(pairs_of({0.9, 0.1}, {1, 0})));
  EXPECT_EQ(out.str().substr(0, 14), "threshold,fpr,");
}
