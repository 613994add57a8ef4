#include <gtest/gtest.h>

#include <functional>
#include <map>

#include "rarepred/error.hpp"
#include "rarepred/metrics.hpp"
#include "rarepred/synth.hpp"

using namespace rarepred;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::InputError;
}

}  // namespace

TEST(Synth, DeterministicForSeed) {
  SynthConfig cfg;
  cfg.n_horizons = 10;
  cfg.seed_history_horizons = 20;
  const Panel a = generate(cfg);
  const Panel b = generate(cfg);
  EXPECT_EQ(a.records(), b.records());
  cfg.seed = 43;
  EXPECT_NE(generate(cfg).records(), a.records());
}

TEST(Synth, DefaultShapeAndRate) {
  const Panel p = generate(SynthConfig{});
  EXPECT_EQ(p.schema(), synth_covariate_names());
  EXPECT_EQ(p.size(), 200u * 16u);
  ASSERT_EQ(p.horizon_boundaries().size(), 50u);
  EXPECT_EQ(p.horizon_boundaries().front(), 150);
  EXPECT_EQ(p.individuals().size(), 42u);
  for (TimeIndex t : p.horizon_boundaries()) EXPECT_EQ(p.indices_at(t).size(), 16u);
  std::size_t events = 0;
  for (const auto& r : p.records()) events += static_cast<std::size_t>(r.outcome);
  const double rate = static_cast<double>(events) / static_cast<double>(p.size());
  EXPECT_GE(rate, 0.03);
  EXPECT_LE(rate, 0.05);
}

TEST(Synth, NoSignalGivesChanceOracle) {
  SynthConfig cfg;
  cfg.slopes.assign(7, 0.0);
  cfg.individual_effects.assign(42, 0.0);
  cfg.frailty_sd = 0.0;
  cfg.n_horizons = 400;
  cfg.target_event_rate = 0.1;
  const auto sp = generate_with_truth(cfg);
  const auto pairs = oracle_score(sp.panel, sp.truth);
  EXPECT_GE(pairs.size(), 5000u);
  EXPECT_NEAR(auc(pairs), 0.5, 0.05);
}

TEST(Synth, TrueModelCarriesSignal) {
  const auto sp = generate_with_truth(SynthConfig{});
  EXPECT_GT(auc(oracle_score(sp.panel, sp.truth)), 0.7);
  EXPECT_EQ(sp.true_probability.size(), sp.panel.size());
  EXPECT_EQ(sp.truth.individual_effects.size(), 42u);
}

TEST(Synth, EventsRaiseNextRecoveryAndRelapse) {
  SynthConfig cfg;
  cfg.n_horizons = 300;
  const Panel p = generate(cfg);
  std::map<std::string, const ObservationRecord*> last;
  double after_event = 0.0, after_none = 0.0, relapse_event = 0.0, relapse_none = 0.0;
  std::size_t n_event = 0, n_none = 0;
  for (const auto& r : p.records()) {
    auto it = last.find(r.individual_id);
    if (it != last.end() && it->second->time_index + 1 == r.time_index) {
      const double jump = r.covariates[2] - it->second->covariates[2];
      const double relapse = r.covariates[3] - it->second->covariates[3];
      if (it->second->outcome == 1) {
        after_event += jump;
        relapse_event += relapse;
        ++n_event;
      } else {
        after_none += jump;
        relapse_none += relapse;
        ++n_none;
      }
    }
    last[r.individual_id] = &r;
  }
  ASSERT_GT(n_event, 20u);
  EXPECT_GT(after_event / n_event - after_none / n_none, 3.0);
  EXPECT_GT(relapse_event / n_event - relapse_none / n_none, 0.3);
}

TEST(Synth, OracleRejectsForeignSchema) {
  const auto sp = generate_with_truth(SynthConfig{});
  const Panel other({"x"}, {{"A", 0, {1.0}, 0}, {"A", 1, {1.0}, 1}}, {1});
  EXPECT_EQ(code_of([&] { oracle_score(other, sp.truth); }), Errc::SchemaMismatch);
}

TEST(Synth, UnreachableRateFailsCalibration) {
  SynthConfig cfg;
  cfg.individual_effects.assign(42, 100.0);
  for (std::size_t i = 0; i < 21; ++i) cfg.individual_effects[i] = -100.0;
  EXPECT_EQ(code_of([&] { generate(cfg); }), Errc::CalibrationFailed);
}

TEST(Synth, Validation) {
  SynthConfig cfg;
  cfg.frailty_persistence = 1.0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::OutOfRange);
  cfg = {};
  cfg.target_event_rate = 0.5;
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::OutOfRange);
  cfg = {};
  cfg.slopes = {1.0};
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::OutOfRange);
  cfg = {};
  cfg.covariate_dynamics = default_dynamics();
  cfg.covariate_dynamics[0].persistence = 1.0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::OutOfRange);
}

TEST(Synth, JsonRoundTrip) {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.n_horizons = 12;
  cfg.frailty_sd = 0.25;
  const SynthConfig back = synth_config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(back), to_json(cfg));
  EXPECT_EQ(synth_config_from_json(nlohmann::json::object()).n_individuals, 42u);
}

TEST(Synth, LateEntrantsHaveNoHistory) {
  SynthConfig cfg;
  cfg.late_entrants = 5;
  cfg.n_horizons = 20;
  const Panel p = generate(cfg);
  for (std::size_t i : p.indices_before(p.horizon_boundaries().front()))
    EXPECT_LT(p[i].individual_id, "P38");
}
