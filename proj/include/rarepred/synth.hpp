#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "rarepred/metrics.hpp"
#include "rarepred/panel.hpp"

namespace rarepred {

// x(h) = mean + persistence * (x(h-1) - mean) + noise * N(0, 1)
struct Ar1Dynamics {
  double mean = 0.0;
  double persistence = 0.0;
  double noise = 1.0;
};

// Seeded stand-in for a team follow-up: AR(1) covariates per individual, a
// random roster at every horizon, logistic outcomes, and injury feedback.
struct SynthConfig {
  std::size_t n_individuals = 42;
  std::size_t n_horizons = 50;
  std::size_t seed_history_horizons = 150;
  std::size_t roster_size_per_horizon = 16;
  // The last `late_entrants` individuals join at the first prediction horizon
  // (no seed history), like players signed for the evaluated season.
  std::size_t late_entrants = 0;
  double target_event_rate = 0.04;
  // One slope per covariate (raw units). Empty: default_slopes().
  std::vector<double> slopes;
  // One fixed effect per individual. Empty: drawn N(0, individual_effect_sd^2).
  std::vector<double> individual_effects;
  double individual_effect_sd = 0.5;
  // Latent drift of each individual's risk: stationary AR(1) on the logit scale.
  double frailty_persistence = 0.98;
  double frailty_sd = 0.7;
  // One entry per covariate. Empty: default_dynamics().
  std::vector<Ar1Dynamics> covariate_dynamics;
  // Added to recovery_days and relapse_risk of an individual after an event.
  double recovery_bump = 5.0;
  double relapse_bump = 0.5;
  // Length (in horizons) of the pre-sample used to calibrate the intercept.
  std::size_t calibration_horizons = 2000;
  std::uint64_t seed = 42;
};

const std::vector<std::string>& synth_covariate_names();
std::vector<Ar1Dynamics> default_dynamics();
std::vector<double> default_slopes();

void validate(const SynthConfig& config);

// Coefficients of the generating model (frailty excluded).
struct TrueModel {
  double intercept = 0.0;
  std::vector<double> slopes;
  std::map<std::string, double> individual_effects;
};

struct SyntheticPanel {
  Panel panel;
  TrueModel truth;
  // Generating probability of every panel record, frailty included.
  std::vector<double> true_probability;
};

SyntheticPanel generate_with_truth(const SynthConfig& config);
Panel generate(const SynthConfig& config);

// Scores every horizon record with the logistic model `truth`.
std::vector<ScoredPair> oracle_score(const Panel& panel, const TrueModel& truth);

nlohmann::json to_json(const SynthConfig& config);
// Missing keys keep their defaults.
SynthConfig synth_config_from_json(const nlohmann::json& doc);

}  // namespace rarepred
