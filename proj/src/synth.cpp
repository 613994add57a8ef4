#include "rarepred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rarepred/error.hpp"
#include "rarepred/logistic.hpp"
#include "rarepred/random.hpp"

namespace rarepred {

namespace {

constexpr std::size_t kRecovery = 2;
constexpr std::size_t kRelapse = 3;

// Effect of a one-standard-deviation change of each covariate on the logit.
constexpr double kStandardizedEffects[] = {0.45, 0.25, -0.30, 0.50, 0.35, 0.20, -0.15};

std::string individual_name(std::size_t j) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "P%02zu", j + 1);
  return buf;
}

double stationary_sd(const Ar1Dynamics& d) { return d.noise / std::sqrt(1.0 - d.persistence * d.persistence); }

// All randomness of one simulated follow-up, drawn up front so the same draws
// can be replayed for different intercepts.
struct Draws {
  std::size_t n_individuals = 0;
  std::size_t n_covariates = 0;
  std::size_t horizons = 0;
  std::vector<double> initial;         // n_individuals * n_covariates
  std::vector<double> initial_frailty; // n_individuals
  std::vector<double> innovations;     // horizons * n_individuals * n_covariates
  std::vector<double> frailty_shocks;  // horizons * n_individuals
  std::vector<std::vector<std::size_t>> rosters;
  std::vector<double> outcome_uniforms;  // horizons * roster size

  // Horizons before `entry` draw their roster from the first n_ind - late individuals.
  Draws(RngStream& rng, std::size_t n_ind, std::size_t n_cov, std::size_t n_h, std::size_t roster, std::size_t late,
        std::size_t entry)
      : n_individuals(n_ind), n_covariates(n_cov), horizons(n_h) {
    initial.resize(n_ind * n_cov);
    for (auto& v : initial) v = rng.normal();
    initial_frailty.resize(n_ind);
    for (auto& v : initial_frailty) v = rng.normal();
    innovations.resize(n_h * n_ind * n_cov);
    for (auto& v : innovations) v = rng.normal();
    frailty_shocks.resize(n_h * n_ind);
    for (auto& v : frailty_shocks) v = rng.normal();
    rosters.resize(n_h);
    std::vector<std::size_t> ids(n_ind);
    for (std::size_t h = 0; h < n_h; ++h) {
      const std::size_t eligible = h < entry ? n_ind - late : n_ind;
      for (std::size_t j = 0; j < n_ind; ++j) ids[j] = j;
      for (std::size_t i = 0; i < roster; ++i) std::swap(ids[i], ids[i + rng.uniform_index(eligible - i)]);
      rosters[h].assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(roster));
      std::sort(rosters[h].begin(), rosters[h].end());
    }
    outcome_uniforms.resize(n_h * roster);
    for (auto& v : outcome_uniforms) v = rng.uniform01();
  }
};

struct SimulatedRecord {
  std::size_t individual = 0;
  std::size_t horizon = 0;
  std::vector<double> covariates;
  int outcome = 0;
  double probability = 0.0;
};

struct Simulation {
  std::vector<SimulatedRecord> records;
  double mean_probability = 0.0;
};

Simulation simulate(const SynthConfig& cfg, const std::vector<Ar1Dynamics>& dyn, const std::vector<double>& slopes,
                    const std::vector<double>& effects, double intercept, const Draws& draws, bool keep_records) {
  const std::size_t n_ind = draws.n_individuals;
  const std::size_t n_cov = draws.n_covariates;
  const std::size_t roster = cfg.roster_size_per_horizon;
  std::vector<double> state(n_ind * n_cov);
  std::vector<double> frailty(n_ind);
  std::vector<double> pending_recovery(n_ind, 0.0);
  std::vector<double> pending_relapse(n_ind, 0.0);
  for (std::size_t j = 0; j < n_ind; ++j) {
    for (std::size_t c = 0; c < n_cov; ++c)
      state[j * n_cov + c] = dyn[c].mean + stationary_sd(dyn[c]) * draws.initial[j * n_cov + c];
    frailty[j] = cfg.frailty_sd * draws.initial_frailty[j];
  }
  const double rho = cfg.frailty_persistence;
  const double frailty_noise = cfg.frailty_sd * std::sqrt(1.0 - rho * rho);

  Simulation sim;
  double sum_p = 0.0;
  std::size_t count = 0;
  for (std::size_t h = 0; h < draws.horizons; ++h) {
    if (h > 0) {
      for (std::size_t j = 0; j < n_ind; ++j) {
        for (std::size_t c = 0; c < n_cov; ++c) {
          double& x = state[j * n_cov + c];
          x = dyn[c].mean + dyn[c].persistence * (x - dyn[c].mean) +
              dyn[c].noise * draws.innovations[(h * n_ind + j) * n_cov + c];
        }
        state[j * n_cov + kRecovery] += pending_recovery[j];
        state[j * n_cov + kRelapse] += pending_relapse[j];
        pending_recovery[j] = 0.0;
        pending_relapse[j] = 0.0;
        frailty[j] = rho * frailty[j] + frailty_noise * draws.frailty_shocks[h * n_ind + j];
      }
    }
    for (std::size_t r = 0; r < roster; ++r) {
      const std::size_t j = draws.rosters[h][r];
      double eta = intercept + effects[j] + frailty[j];
      for (std::size_t c = 0; c < n_cov; ++c) eta += slopes[c] * state[j * n_cov + c];
      const double p = sigmoid(eta);
      const int y = draws.outcome_uniforms[h * roster + r] < p ? 1 : 0;
      if (y == 1) {
        pending_recovery[j] = cfg.recovery_bump;
        pending_relapse[j] = cfg.relapse_bump;
      }
      sum_p += p;
      ++count;
      if (keep_records) {
        SimulatedRecord rec;
        rec.individual = j;
        rec.horizon = h;
        rec.covariates.assign(state.begin() + static_cast<std::ptrdiff_t>(j * n_cov),
                              state.begin() + static_cast<std::ptrdiff_t>((j + 1) * n_cov));
        rec.outcome = y;
        rec.probability = p;
        sim.records.push_back(std::move(rec));
      }
    }
  }
  sim.mean_probability = count ? sum_p / static_cast<double>(count) : 0.0;
  return sim;
}

}  // namespace

const std::vector<std::string>& synth_covariate_names() {
  static const std::vector<std::string> names = {"workload_21d", "playtime_21d", "recovery_days", "relapse_risk",
                                                 "accel_ratio",  "decel_ratio",  "speed_ratio"};
  return names;
}

std::vector<Ar1Dynamics> default_dynamics() {
  return {
      {2500.0, 0.90, 250.0},  // workload_21d (arbitrary load units)
      {200.0, 0.85, 40.0},    // playtime_21d (minutes)
      {4.0, 0.50, 1.2},       // recovery_days
      {1.0, 0.95, 0.08},      // relapse_risk
      {0.33, 0.70, 0.04},     // accel_ratio (7-day / 21-day)
      {0.33, 0.70, 0.04},     // decel_ratio
      {1.0, 0.70, 0.05},      // speed_ratio
  };
}

std::vector<double> default_slopes() {
  const auto dyn = default_dynamics();
  std::vector<double> slopes;
  for (std::size_t c = 0; c < dyn.size(); ++c) slopes.push_back(kStandardizedEffects[c] / stationary_sd(dyn[c]));
  return slopes;
}

void validate(const SynthConfig& cfg) {
  const std::size_t n_cov = synth_covariate_names().size();
  if (cfg.n_individuals < 2) throw Error(Errc::OutOfRange, "need at least two individuals");
  if (cfg.n_horizons < 1) throw Error(Errc::OutOfRange, "need at least one horizon");
  if (cfg.seed_history_horizons < 1) throw Error(Errc::OutOfRange, "need at least one history horizon");
  if (cfg.late_entrants >= cfg.n_individuals) throw Error(Errc::OutOfRange, "late_entrants must be < n_individuals");
  if (cfg.roster_size_per_horizon < 1 || cfg.roster_size_per_horizon > cfg.n_individuals - cfg.late_entrants)
    throw Error(Errc::OutOfRange, "roster size must lie in [1, n_individuals - late_entrants]");
  if (!(cfg.target_event_rate > 0.0 && cfg.target_event_rate < 0.5))
    throw Error(Errc::OutOfRange, "target event rate must lie in (0, 0.5)");
  if (!(cfg.frailty_persistence >= 0.0 && cfg.frailty_persistence < 1.0) || !(cfg.frailty_sd >= 0.0))
    throw Error(Errc::OutOfRange, "frailty persistence must lie in [0, 1) and its sd be non-negative");
  if (!cfg.slopes.empty() && cfg.slopes.size() != n_cov)
    throw Error(Errc::OutOfRange, "slopes must have one entry per covariate");
  if (!cfg.individual_effects.empty() && cfg.individual_effects.size() != cfg.n_individuals)
    throw Error(Errc::OutOfRange, "individual_effects must have one entry per individual");
  if (!cfg.covariate_dynamics.empty() && cfg.covariate_dynamics.size() != n_cov)
    throw Error(Errc::OutOfRange, "covariate_dynamics must have one entry per covariate");
  for (const auto& d : cfg.covariate_dynamics) {
    if (!(d.persistence >= 0.0 && d.persistence < 1.0) || !(d.noise >= 0.0))
      throw Error(Errc::OutOfRange, "AR(1) persistence must lie in [0, 1) and noise be non-negative");
  }
  if (cfg.calibration_horizons < 1) throw Error(Errc::OutOfRange, "calibration pre-sample is empty");
}

SyntheticPanel generate_with_truth(const SynthConfig& cfg) {
  validate(cfg);
  const auto& names = synth_covariate_names();
  const std::size_t n_cov = names.size();
  const auto dyn = cfg.covariate_dynamics.empty() ? default_dynamics() : cfg.covariate_dynamics;
  const auto slopes = cfg.slopes.empty() ? default_slopes() : cfg.slopes;

  const RngStream root(cfg.seed);
  std::vector<double> effects = cfg.individual_effects;
  if (effects.empty()) {
    RngStream rng = root.child({0});
    effects.resize(cfg.n_individuals);
    for (auto& e : effects) e = cfg.individual_effect_sd * rng.normal();
  }

  // Intercept: bisection on the mean generating probability of a long
  // pre-sample that replays the same draws for every candidate.
  RngStream calibration_rng = root.child({1});
  const Draws pre(calibration_rng, cfg.n_individuals, n_cov, cfg.calibration_horizons, cfg.roster_size_per_horizon,
                  0, 0);
  auto rate_at = [&](double c) { return simulate(cfg, dyn, slopes, effects, c, pre, false).mean_probability; };
  double lo = -30.0;
  double hi = 10.0;
  if (!(rate_at(lo) < cfg.target_event_rate && rate_at(hi) > cfg.target_event_rate))
    throw Error(Errc::CalibrationFailed, "target event rate not bracketed by intercepts in [-30, 10]");
  for (int it = 0; it < 100 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) < cfg.target_event_rate) lo = mid;
    else hi = mid;
  }
  const double intercept = 0.5 * (lo + hi);
  if (std::abs(rate_at(intercept) - cfg.target_event_rate) > 0.005)
    throw Error(Errc::CalibrationFailed, "calibrated event rate misses the target");

  RngStream panel_rng = root.child({2});
  const std::size_t total = cfg.seed_history_horizons + cfg.n_horizons;
  const Draws draws(panel_rng, cfg.n_individuals, n_cov, total, cfg.roster_size_per_horizon, cfg.late_entrants,
                    cfg.seed_history_horizons);
  Simulation sim = simulate(cfg, dyn, slopes, effects, intercept, draws, true);

  SyntheticPanel out;
  out.truth.intercept = intercept;
  out.truth.slopes = slopes;
  for (std::size_t j = 0; j < cfg.n_individuals; ++j) out.truth.individual_effects[individual_name(j)] = effects[j];

  std::vector<ObservationRecord> records;
  records.reserve(sim.records.size());
  for (auto& r : sim.records) {
    records.push_back({individual_name(r.individual), static_cast<TimeIndex>(r.horizon), std::move(r.covariates),
                       r.outcome});
  }
  std::vector<TimeIndex> horizons;
  for (std::size_t h = cfg.seed_history_horizons; h < total; ++h) horizons.push_back(static_cast<TimeIndex>(h));
  // Simulation order is already (horizon, individual id), which is the panel order.
  out.true_probability.reserve(sim.records.size());
  for (const auto& r : sim.records) out.true_probability.push_back(r.probability);
  out.panel = Panel(names, std::move(records), std::move(horizons));
  return out;
}

Panel generate(const SynthConfig& config) { return generate_with_truth(config).panel; }

std::vector<ScoredPair> oracle_score(const Panel& panel, const TrueModel& truth) {
  if (truth.slopes.size() != panel.schema().size())
    throw Error(Errc::SchemaMismatch, "model has " + std::to_string(truth.slopes.size()) + " slopes, panel has " +
                                          std::to_string(panel.schema().size()) + " covariates");
  std::vector<ScoredPair> pairs;
  for (std::size_t i : panel.horizon_indices()) {
    const auto& rec = panel[i];
    auto it = truth.individual_effects.find(rec.individual_id);
    if (it == truth.individual_effects.end())
      throw Error(Errc::SchemaMismatch, "no effect for individual '" + rec.individual_id + "'");
    double eta = truth.intercept + it->second;
    for (std::size_t c = 0; c < truth.slopes.size(); ++c) eta += truth.slopes[c] * rec.covariates[c];
    pairs.push_back({sigmoid(eta), rec.outcome, rec.time_index, rec.individual_id});
  }
  return pairs;
}

nlohmann::json to_json(const SynthConfig& c) {
  nlohmann::json doc{{"n_individuals", c.n_individuals},
                     {"n_horizons", c.n_horizons},
                     {"seed_history_horizons", c.seed_history_horizons},
                     {"roster_size_per_horizon", c.roster_size_per_horizon},
                     {"late_entrants", c.late_entrants},
                     {"target_event_rate", c.target_event_rate},
                     {"slopes", c.slopes},
                     {"individual_effects", c.individual_effects},
                     {"individual_effect_sd", c.individual_effect_sd},
                     {"frailty_persistence", c.frailty_persistence},
                     {"frailty_sd", c.frailty_sd},
                     {"recovery_bump", c.recovery_bump},
                     {"relapse_bump", c.relapse_bump},
                     {"calibration_horizons", c.calibration_horizons},
                     {"seed", c.seed}};
  nlohmann::json dyn = nlohmann::json::array();
  for (const auto& d : c.covariate_dynamics)
    dyn.push_back({{"mean", d.mean}, {"persistence", d.persistence}, {"noise", d.noise}});
  doc["covariate_dynamics"] = dyn;
  return doc;
}

SynthConfig synth_config_from_json(const nlohmann::json& doc) {
  SynthConfig c;
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("n_individuals", c.n_individuals);
  get("n_horizons", c.n_horizons);
  get("seed_history_horizons", c.seed_history_horizons);
  get("roster_size_per_horizon", c.roster_size_per_horizon);
  get("late_entrants", c.late_entrants);
  get("target_event_rate", c.target_event_rate);
  get("slopes", c.slopes);
  get("individual_effects", c.individual_effects);
  get("individual_effect_sd", c.individual_effect_sd);
  get("frailty_persistence", c.frailty_persistence);
  get("frailty_sd", c.frailty_sd);
  get("recovery_bump", c.recovery_bump);
  get("relapse_bump", c.relapse_bump);
  get("calibration_horizons", c.calibration_horizons);
  get("seed", c.seed);
  if (doc.contains("covariate_dynamics")) {
    for (const auto& d : doc.at("covariate_dynamics"))
      c.covariate_dynamics.push_back({d.at("mean").get<double>(), d.at("persistence").get<double>(),
                                      d.at("noise").get<double>()});
  }
  return c;
}

}  // namespace rarepred
