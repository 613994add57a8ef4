#include "rarepred/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "rarepred/error.hpp"
#include "rarepred/parallel.hpp"

namespace rarepred {

std::string to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Longitudinal: return "longitudinal";
    case Protocol::Loocv: return "loocv";
    case Protocol::Split: return "split";
  }
  return "?";
}

namespace {

struct Prediction {
  std::vector<double> probabilities;
  std::vector<std::vector<double>> replicate_probabilities;
  std::size_t n_failed = 0;
  std::size_t n_separated = 0;
  std::size_t n_unseen = 0;
};

struct Trained {
  Encoding encoding;
  EnsembleModel model;
};

// Starting points for the next fit: one per replicate, taken from a previous
// model with the same column layout.
struct WarmStart {
  std::vector<std::string> columns;
  std::vector<Eigen::VectorXd> betas;
};

WarmStart warm_start_from(const Trained& trained) {
  WarmStart ws;
  ws.columns = trained.encoding.column_names;
  for (const auto& r : trained.model.replicates)
    if (!r.failed && r.fit.converged) ws.betas.push_back(r.fit.beta);
  return ws;
}

Trained train_on(const Panel& panel, const std::vector<std::size_t>& train, const Recipe& recipe, std::uint64_t seed,
                 const WarmStart* warm = nullptr) {
  const DesignMatrix design = encode(panel, train, recipe.encode);
  EnsembleOptions opts;
  opts.control = recipe.control;
  opts.distance = recipe.distance;
  opts.max_attempts = recipe.max_attempts;
  if (warm && warm->columns == design.encoding.column_names) opts.warm_starts = warm->betas;
  return {design.encoding, train_ensemble(design, recipe.spec, recipe.K, seed, opts)};
}

Prediction predict_on(const Panel& panel, const Trained& trained, const std::vector<std::size_t>& targets,
                      bool keep_replicates) {
  const DesignMatrix rows = encode_with(trained.encoding, panel, targets);
  Prediction out;
  const Eigen::MatrixXd reps = trained.model.replicate_probabilities(rows.rows);
  out.probabilities.resize(targets.size());
  for (Eigen::Index i = 0; i < reps.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < reps.cols(); ++c) sum += reps(i, c);
    out.probabilities[static_cast<std::size_t>(i)] = sum / static_cast<double>(reps.cols());
    if (keep_replicates) {
      std::vector<double> row(static_cast<std::size_t>(reps.cols()));
      for (Eigen::Index c = 0; c < reps.cols(); ++c) row[static_cast<std::size_t>(c)] = reps(i, c);
      out.replicate_probabilities.push_back(std::move(row));
    }
  }
  out.n_failed = trained.model.n_failed();
  out.n_separated = trained.model.n_separated();
  out.n_unseen = rows.count_unseen();
  return out;
}

std::size_t count_events(const Panel& panel, const std::vector<std::size_t>& idx) {
  std::size_t n = 0;
  for (std::size_t i : idx) n += static_cast<std::size_t>(panel[i].outcome);
  return n;
}

void append_pairs(EvalReport& report, const Panel& panel, const std::vector<std::size_t>& targets,
                  Prediction& pred) {
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& rec = panel[targets[j]];
    report.pairs.push_back({pred.probabilities[j], rec.outcome, rec.time_index, rec.individual_id});
  }
  for (auto& r : pred.replicate_probabilities) report.replicate_scores.push_back(std::move(r));
}

}  // namespace

void compute_metrics(EvalReport& report) {
  const RocCurve curve = roc(report.pairs);
  report.auc = auc(curve);
  const PeirceResult pr = peirce(curve);
  report.peirce = pr.index;
  report.gamma_star = pr.gamma_star;
  report.sens_at_star = pr.sensitivity;
  report.spec_at_star = pr.specificity;
}

EvalReport longitudinal_eval(const Panel& panel, const Recipe& recipe, const EvalOptions& options) {
  const auto& horizons = panel.horizon_boundaries();
  if (horizons.empty()) throw Error(Errc::NoSeedHistory, "panel has no prediction horizon");
  const auto seed_history = panel.indices_before(horizons.front());
  const std::size_t seed_events = count_events(panel, seed_history);
  if (seed_history.empty() || seed_events == 0 || seed_events == seed_history.size())
    throw Error(Errc::NoSeedHistory, "history before the first horizon must contain events and non-events");

  EvalReport report;
  report.protocol = Protocol::Longitudinal;
  std::optional<WarmStart> warm;
  for (TimeIndex t : horizons) {
    const auto train = panel.indices_before(t);
    const auto targets = panel.indices_at(t);
    StepDiagnostic step;
    step.time_index = t;
    step.n_train = train.size();
    step.n_events_train = count_events(panel, train);
    step.n_predicted = targets.size();
    if (!targets.empty()) {
      const Trained trained = train_on(panel, train, recipe, derive_seed(recipe.seed, {static_cast<std::uint64_t>(t)}),
                                       warm ? &*warm : nullptr);
      if (options.warm_start_steps) warm = warm_start_from(trained);
      Prediction pred = predict_on(panel, trained, targets, options.keep_replicate_scores);
      step.n_failed_replicates = pred.n_failed;
      step.n_separated_replicates = pred.n_separated;
      step.n_unseen = pred.n_unseen;
      append_pairs(report, panel, targets, pred);
    }
    report.per_step_diagnostics.push_back(step);
  }
  compute_metrics(report);
  return report;
}

EvalReport loocv_eval(const Panel& panel, const Recipe& recipe, const EvalOptions& options) {
  const auto targets = panel.horizon_indices();
  if (targets.size() < 2) throw Error(Errc::OneClassOnly, "leave-one-out needs at least two prediction records");

  std::optional<WarmStart> warm;
  if (options.warm_start_folds) {
    std::vector<std::size_t> all(panel.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    try {
      const DesignMatrix full = encode(panel, all, recipe.encode);
      warm = WarmStart{full.encoding.column_names, {fit(full, recipe.control).beta}};
    } catch (const Error&) {
      warm.reset();
    }
  }

  std::vector<Prediction> preds(targets.size());
  std::vector<std::size_t> n_train(targets.size());
  std::vector<std::size_t> n_events(targets.size());
  parallel_for(targets.size(), options.jobs, [&](std::size_t f) {
    std::vector<std::size_t> train;
    train.reserve(panel.size() - 1);
    for (std::size_t i = 0; i < panel.size(); ++i) {
      if (i != targets[f]) train.push_back(i);
    }
    n_train[f] = train.size();
    n_events[f] = count_events(panel, train);
    if (n_events[f] == 0 || n_events[f] == train.size())
      throw Error(Errc::OneClassOnly, "leave-one-out training fold has a single class");
    const Trained trained = train_on(panel, train, recipe, derive_seed(recipe.seed, {static_cast<std::uint64_t>(f)}),
                                     warm ? &*warm : nullptr);
    preds[f] = predict_on(panel, trained, {targets[f]}, options.keep_replicate_scores);
  });

  EvalReport report;
  report.protocol = Protocol::Loocv;
  for (std::size_t f = 0; f < targets.size(); ++f) {
    const auto& rec = panel[targets[f]];
    StepDiagnostic step;
    step.time_index = rec.time_index;
    step.n_train = n_train[f];
    step.n_events_train = n_events[f];
    step.n_predicted = 1;
    step.n_failed_replicates = preds[f].n_failed;
    step.n_separated_replicates = preds[f].n_separated;
    step.n_unseen = preds[f].n_unseen;
    report.per_step_diagnostics.push_back(step);
    append_pairs(report, panel, {targets[f]}, preds[f]);
  }
  compute_metrics(report);
  return report;
}

EvalReport split_eval(const Panel& panel, TimeIndex boundary, const Recipe& recipe, const EvalOptions& options) {
  const auto train = panel.indices_before(boundary);
  std::vector<std::size_t> targets;
  for (std::size_t i : panel.horizon_indices()) {
    if (panel[i].time_index >= boundary) targets.push_back(i);
  }
  if (train.empty() || targets.empty())
    throw Error(Errc::EmptySide, "split at " + std::to_string(boundary) + " leaves an empty side");
  const std::size_t events = count_events(panel, train);
  if (events == 0 || events == train.size()) throw Error(Errc::OneClassOnly, "training side has a single class");

  const Trained trained =
      train_on(panel, train, recipe, derive_seed(recipe.seed, {static_cast<std::uint64_t>(boundary)}));
  EvalReport report;
  report.protocol = Protocol::Split;
  for (TimeIndex t : panel.horizon_boundaries()) {
    if (t < boundary) continue;
    const auto at = panel.indices_at(t);
    StepDiagnostic step;
    step.time_index = t;
    step.n_train = train.size();
    step.n_events_train = events;
    step.n_predicted = at.size();
    step.n_failed_replicates = trained.model.n_failed();
    step.n_separated_replicates = trained.model.n_separated();
    if (!at.empty()) {
      Prediction pred = predict_on(panel, trained, at, options.keep_replicate_scores);
      step.n_unseen = pred.n_unseen;
      append_pairs(report, panel, at, pred);
    }
    report.per_step_diagnostics.push_back(step);
  }
  compute_metrics(report);
  return report;
}

std::vector<AggregationPoint> aggregation_curve(const EvalReport& report) {
  if (report.replicate_scores.size() != report.pairs.size() || report.pairs.empty())
    throw Error(Errc::EmptyInput, "report carries no per-replicate scores");
  std::size_t k_max = std::numeric_limits<std::size_t>::max();
  for (const auto& r : report.replicate_scores) k_max = std::min(k_max, r.size());

  std::vector<AggregationPoint> curve;
  std::vector<ScoredPair> pairs = report.pairs;
  std::vector<double> sums(pairs.size(), 0.0);
  for (std::size_t K = 1; K <= k_max; ++K) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      sums[i] += report.replicate_scores[i][K - 1];
      pairs[i].score = sums[i] / static_cast<double>(K);
    }
    const RocCurve c = roc(pairs);
    curve.push_back({K, auc(c), peirce(c).index});
  }
  return curve;
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

SweepRow summarize_runs(const std::string& spec, const std::vector<std::optional<EvalReport>>& runs,
                        const std::vector<std::string>& errors) {
  SweepRow row;
  row.spec = spec;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!runs[r]) {
      if (row.error.empty() && r < errors.size()) row.error = errors[r];
      continue;
    }
    row.aucs.push_back(runs[r]->auc);
    row.pis.push_back(runs[r]->peirce);
  }
  row.runs = row.aucs.size();
  if (row.runs == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.mean_auc = row.std_auc = row.mean_pi = row.std_pi = row.sens_at_star = row.spec_at_star = nan;
    return row;
  }
  double sum_auc = 0.0;
  double sum_pi = 0.0;
  for (std::size_t i = 0; i < row.runs; ++i) {
    sum_auc += row.aucs[i];
    sum_pi += row.pis[i];
  }
  row.mean_auc = sum_auc / static_cast<double>(row.runs);
  row.mean_pi = sum_pi / static_cast<double>(row.runs);
  row.std_auc = sample_std(row.aucs);
  row.std_pi = sample_std(row.pis);
  // First run on ties.
  const EvalReport* representative = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& run : runs) {
    if (!run) continue;
    const double d = std::abs(run->peirce - row.mean_pi);
    if (d < best) {
      best = d;
      representative = &*run;
    }
  }
  row.sens_at_star = representative->sens_at_star;
  row.spec_at_star = representative->spec_at_star;
  return row;
}

SweepTable rate_sweep(const Panel& panel, const std::vector<SamplerSpec>& grid, std::size_t R, std::size_t K,
                      std::uint64_t seed, const Recipe& base, const EvalOptions& options) {
  if (grid.empty()) throw Error(Errc::OutOfRange, "sweep grid is empty");
  if (R < 2) throw Error(Errc::OutOfRange, "sweep needs at least two repeats");

  SweepTable table;
  for (const auto& spec : grid) {
    const std::string name = to_string(spec);
    std::vector<std::optional<EvalReport>> runs(R);
    std::vector<std::string> errors(R);
    parallel_for(R, options.jobs, [&](std::size_t r) {
      Recipe recipe = base;
      recipe.name = name;
      recipe.spec = spec;
      recipe.K = K;
      recipe.seed = derive_seed(seed, {r});
      EvalOptions inner = options;
      inner.jobs = 1;
      try {
        runs[r] = longitudinal_eval(panel, recipe, inner);
      } catch (const Error& e) {
        errors[r] = e.what();
      }
    });
    table.rows.push_back(summarize_runs(name, runs, errors));
  }
  return table;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["protocol"] = to_string(report.protocol);
  doc["auc"] = number_or_null(report.auc);
  doc["peirce"] = number_or_null(report.peirce);
  doc["gamma_star"] = number_or_null(report.gamma_star);
  doc["sens_at_star"] = number_or_null(report.sens_at_star);
  doc["spec_at_star"] = number_or_null(report.spec_at_star);
  doc["pairs"] = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    doc["pairs"].push_back({{"time", p.time_index}, {"id", p.individual_id}, {"score", p.score}, {"outcome", p.outcome}});
  }
  doc["steps"] = nlohmann::json::array();
  for (const auto& s : report.per_step_diagnostics) {
    doc["steps"].push_back({{"time", s.time_index},
                            {"n_train", s.n_train},
                            {"n_events_train", s.n_events_train},
                            {"n_predicted", s.n_predicted},
                            {"n_failed_replicates", s.n_failed_replicates},
                            {"n_separated_replicates", s.n_separated_replicates},
                            {"n_unseen", s.n_unseen}});
  }
  return doc;
}

nlohmann::json to_json(const SweepTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json j{{"spec", r.spec},
                     {"runs", r.runs},
                     {"mean_auc", number_or_null(r.mean_auc)},
                     {"std_auc", number_or_null(r.std_auc)},
                     {"mean_pi", number_or_null(r.mean_pi)},
                     {"std_pi", number_or_null(r.std_pi)},
                     {"mean_sens_at_star", number_or_null(r.sens_at_star)},
                     {"mean_spec_at_star", number_or_null(r.spec_at_star)},
                     {"aucs", r.aucs},
                     {"pis", r.pis}};
    if (!r.error.empty()) j["error"] = r.error;
    doc.push_back(std::move(j));
  }
  return doc;
}

void write_pairs_csv(std::ostream& out, const EvalReport& report) {
  out << "time,id,score,outcome\n";
  for (const auto& p : report.pairs)
    out << p.time_index << ',' << p.individual_id << ',' << format_double(p.score) << ',' << p.outcome << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "spec,mean_auc,std_auc,mean_pi,std_pi,mean_sens_at_star,mean_spec_at_star\n";
  auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); };
  for (const auto& r : table.rows) {
    out << '"' << r.spec << '"' << ',' << num(r.mean_auc) << ',' << num(r.std_auc) << ',' << num(r.mean_pi) << ','
        << num(r.std_pi) << ',' << num(r.sens_at_star) << ',' << num(r.spec_at_star) << '\n';
  }
}

}  // namespace rarepred
