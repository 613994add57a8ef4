#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rarepred/design.hpp"
#include "rarepred/ensemble.hpp"
#include "rarepred/metrics.hpp"
#include "rarepred/panel.hpp"

namespace rarepred {

// Everything needed to turn a training subset into a predictor.
struct Recipe {
  std::string name = "plain";
  SamplerSpec spec;
  std::size_t K = 1;
  std::uint64_t seed = 0;
  FitControl control;
  EncodeOptions encode;
  DistanceOptions distance;
  int max_attempts = 10;
};

enum class Protocol { Longitudinal, Loocv, Split };

std::string to_string(Protocol protocol);

struct StepDiagnostic {
  TimeIndex time_index = 0;
  std::size_t n_train = 0;
  std::size_t n_events_train = 0;
  std::size_t n_predicted = 0;
  std::size_t n_failed_replicates = 0;
  std::size_t n_separated_replicates = 0;
  std::size_t n_unseen = 0;
};

struct EvalReport {
  Protocol protocol = Protocol::Longitudinal;
  std::vector<ScoredPair> pairs;
  double auc = 0.0;
  double peirce = 0.0;
  double gamma_star = 0.0;
  double sens_at_star = 0.0;
  double spec_at_star = 0.0;
  std::vector<StepDiagnostic> per_step_diagnostics;
  // Per-pair probabilities of every successful replicate (only when requested).
  std::vector<std::vector<double>> replicate_scores;
};

struct EvalOptions {
  std::size_t jobs = 1;
  bool keep_replicate_scores = false;
  // Leave-one-out folds start IRLS from the full-data fit.
  bool warm_start_folds = true;
  // Each rolling-origin step starts replicate k from replicate k of the
  // previous step. Faster, but separated fits then stop at path-dependent
  // coefficients, so scores differ slightly from cold starts.
  bool warm_start_steps = false;
};

// Rolling origin: at every horizon t, train on records with time < t and score
// the records at t.
EvalReport longitudinal_eval(const Panel& panel, const Recipe& recipe, const EvalOptions& options = {});

// Every horizon record is scored by a model trained on all other records.
EvalReport loocv_eval(const Panel& panel, const Recipe& recipe, const EvalOptions& options = {});

// One model trained on records with time < boundary scores every later horizon.
EvalReport split_eval(const Panel& panel, TimeIndex boundary, const Recipe& recipe, const EvalOptions& options = {});

// Fills auc, peirce and the operating point from `pairs`.
void compute_metrics(EvalReport& report);

// AUC and Peirce index of the running aggregate over the first K replicates,
// K = 1..max; requires replicate_scores.
struct AggregationPoint {
  std::size_t K = 0;
  double auc = 0.0;
  double peirce = 0.0;
};
std::vector<AggregationPoint> aggregation_curve(const EvalReport& report);

struct SweepRow {
  std::string spec;
  std::size_t runs = 0;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double mean_pi = 0.0;
  double std_pi = 0.0;
  // Operating point of the run whose Peirce index is closest to the mean.
  double sens_at_star = 0.0;
  double spec_at_star = 0.0;
  std::vector<double> aucs;
  std::vector<double> pis;
  std::string error;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// Mean/std over the successful runs; the first error message is kept.
SweepRow summarize_runs(const std::string& spec, const std::vector<std::optional<EvalReport>>& runs,
                        const std::vector<std::string>& errors);

// Runs longitudinal_eval R times per grid spec; repeat r uses recipe seed
// derive_seed(seed, {r}) for every spec.
SweepTable rate_sweep(const Panel& panel, const std::vector<SamplerSpec>& grid, std::size_t R, std::size_t K,
                      std::uint64_t seed, const Recipe& base = {}, const EvalOptions& options = {});

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(const std::vector<double>& values);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const SweepTable& table);
void write_pairs_csv(std::ostream& out, const EvalReport& report);
// Columns: spec,mean_auc,std_auc,mean_pi,std_pi,mean_sens_at_star,mean_spec_at_star
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace rarepred
