#include <gtest/gtest.h>

#include <cmath>

#include "rarepred/ensemble.hpp"
#include "rarepred/error.hpp"
#include "rarepred/random.hpp"

using namespace rarepred;

namespace {

DesignMatrix noisy_design(std::size_t n, double rate, std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    x(i, 2) = rng.normal();
    y(i) = rng.uniform01() < rate * std::exp(0.8 * x(i, 1)) ? 1.0 : 0.0;
  }
  y(0) = 1.0;
  y(1) = 0.0;
  return DesignMatrix::from_arrays(x, y);
}

}  // namespace

TEST(Aggregate, MeanInIndexOrder) {
  const std::vector<double> p = {0.1, 0.2, 0.6};
  EXPECT_DOUBLE_EQ(aggregate_probabilities(p), 0.3);
  EXPECT_THROW(aggregate_probabilities(std::span<const double>()), Error);
}

TEST(Ensemble, PredictIsMeanOfReplicates) {
  const DesignMatrix d = noisy_design(300, 0.08, 1);
  const auto model = train_ensemble(d, parse_spec("under(0.5)"), 7, 11);
  EXPECT_EQ(model.n_successful(), 7u);
  const Eigen::MatrixXd reps = model.replicate_probabilities(d.rows);
  const Eigen::VectorXd agg = model.predict(d.rows);
  for (Eigen::Index i = 0; i < 20; ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < reps.cols(); ++k) s += reps(i, k);
    EXPECT_NEAR(agg(i), s / 7.0, 1e-15);
    EXPECT_NEAR(predict_aggregate(model, d.rows.row(i).transpose()), agg(i), 1e-15);
  }
}

TEST(Ensemble, SeedsFollowDerivation) {
  const DesignMatrix d = noisy_design(200, 0.1, 2);
  const auto model = train_ensemble(d, parse_spec("over(2:1)"), 4, 99);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(model.replicates[k].seed, derive_seed(99, {k, 0}));
    EXPECT_EQ(model.replicates[k].attempts, 1);
  }
}

TEST(Ensemble, DeterministicAndJobInvariant) {
  const DesignMatrix d = noisy_design(250, 0.08, 3);
  EnsembleOptions serial, parallel;
  parallel.jobs = 4;
  const auto a = train_ensemble(d, parse_spec("smote(k=3,m=2)"), 6, 5, serial);
  const auto b = train_ensemble(d, parse_spec("smote(k=3,m=2)"), 6, 5, parallel);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(a.replicates[k].fit.beta, b.replicates[k].fit.beta);
}

TEST(Ensemble, PlainReplicatesIdentical) {
  const DesignMatrix d = noisy_design(200, 0.1, 4);
  const auto model = train_ensemble(d, parse_spec("id"), 5, 1);
  for (const auto& r : model.replicates) EXPECT_EQ(r.fit.beta, model.replicates[0].fit.beta);
  const Eigen::VectorXd diff = model.predict(d.rows) - model.replicates[0].fit.predict(d.rows);
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Ensemble, AllReplicatesFailing) {
  Eigen::MatrixXd x(6, 2);
  x << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4, 1, 5;
  const DesignMatrix all_events = DesignMatrix::from_arrays(x, Eigen::VectorXd::Ones(6));
  EnsembleOptions opts;
  opts.max_attempts = 3;
  try {
    train_ensemble(all_events, parse_spec("boot(maj)"), 3, 1, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AllReplicatesFailed);
  }
}

TEST(Ensemble, JsonRoundTrip) {
  const DesignMatrix d = noisy_design(200, 0.1, 5);
  const auto model = train_ensemble(d, parse_spec("under(0.3)+over(1:1)"), 3, 8);
  const auto back = ensemble_from_json(to_json(model));
  EXPECT_EQ(to_string(back.spec), "under(0.3)+over(1:1)");
  EXPECT_EQ(back.predict(d.rows), model.predict(d.rows));
  EXPECT_EQ(to_json(back), to_json(model));
}

TEST(Ensemble, RejectsZeroK) {
  const DesignMatrix d = noisy_design(50, 0.2, 6);
  EXPECT_THROW(train_ensemble(d, parse_spec("id"), 0, 1), Error);
}

TEST(Ensemble, ColumnEmptiedByResamplingGetsZeroCoefficient) {
  // Column 2 is nonzero only on non-event row 0;
  // under(0.7) keeps two of the five non-events, so most replicates lose it.
  Eigen::MatrixXd x(8, 3);
  Eigen::VectorXd y(8);
  x << 1, 0.0, 1, 1, 0.3, 0, 1, -0.5, 0, 1, 1.2, 0, 1, 0.8, 0, 1, -1.1, 0, 1, 0.1, 0, 1, 0.7, 0;
  y << 0, 0, 0, 0, 1, 0, 1, 1;
  const DesignMatrix d = DesignMatrix::from_arrays(x, y);
  const auto model = train_ensemble(d, parse_spec("under(0.7)"), 12, 4);
  EXPECT_EQ(model.n_failed(), 0u);
  std::size_t dropped = 0;
  for (const auto& r : model.replicates) {
    ASSERT_EQ(r.fit.beta.size(), 3);
    if (r.fit.beta(2) == 0.0) {
      ++dropped;
      EXPECT_TRUE(std::isnan(r.fit.covariance(2, 2)));
    }
  }
  EXPECT_GT(dropped, 0u);
}
