#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "rarepred/logistic.hpp"
#include "rarepred/resampling.hpp"

namespace rarepred {

struct EnsembleOptions {
  FitControl control;
  DistanceOptions distance;
  // A replicate whose resample leaves one class empty is redrawn with a fresh
  // seed; after this many attempts it is dropped.
  int max_attempts = 10;
  std::size_t jobs = 1;
  // Optional IRLS starting points, one per replicate index (cycled); entries
  // whose length differs from the design width are ignored.
  std::vector<Eigen::VectorXd> warm_starts;
};

struct Replicate {
  std::size_t index = 0;
  std::uint64_t seed = 0;  // seed of the successful (or last) attempt
  std::vector<std::uint64_t> stage_seeds;
  int attempts = 0;
  bool failed = false;
  std::string error;
  std::size_t n_rows = 0;       // rows of the resampled set, counting duplicates
  std::size_t n_synthetic = 0;
  FittedLogistic fit;           // meaningful only when !failed
};

// K models fit on K resamples of the same training design; predictions are the
// mean of the replicate probabilities.
struct EnsembleModel {
  SamplerSpec spec;
  std::size_t K = 0;
  std::uint64_t base_seed = 0;
  std::vector<Replicate> replicates;

  std::size_t n_successful() const;
  std::size_t n_failed() const;
  std::size_t n_separated() const;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;
  // One column per successful replicate, in replicate order.
  Eigen::MatrixXd replicate_probabilities(const Eigen::MatrixXd& rows) const;
};

// Replicate k resamples with the stream derived from (seed, k, attempt).
EnsembleModel train_ensemble(const DesignMatrix& design, const SamplerSpec& spec, std::size_t K, std::uint64_t seed,
                             const EnsembleOptions& options = {});

double predict_aggregate(const EnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// Mean in fixed (index) order.
double aggregate_probabilities(std::span<const double> probabilities);

nlohmann::json to_json(const EnsembleModel& model);
// Restores spec, seeds and coefficients (covariances are not serialized).
EnsembleModel ensemble_from_json(const nlohmann::json& doc);

}  // namespace rarepred
