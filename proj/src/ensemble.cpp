#include "rarepred/ensemble.hpp"

#include <algorithm>
#include <limits>

#include "rarepred/error.hpp"
#include "rarepred/parallel.hpp"

namespace rarepred {

std::size_t EnsembleModel::n_successful() const {
  return static_cast<std::size_t>(
      std::count_if(replicates.begin(), replicates.end(), [](const Replicate& r) { return !r.failed; }));
}

std::size_t EnsembleModel::n_failed() const { return replicates.size() - n_successful(); }

std::size_t EnsembleModel::n_separated() const {
  return static_cast<std::size_t>(std::count_if(replicates.begin(), replicates.end(), [](const Replicate& r) {
    return !r.failed && r.fit.separation_flag;
  }));
}

double aggregate_probabilities(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(Errc::EmptyInput, "nothing to aggregate");
  double sum = 0.0;
  for (double p : probabilities) sum += p;
  return sum / static_cast<double>(probabilities.size());
}

double EnsembleModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<double> probs;
  probs.reserve(replicates.size());
  for (const auto& r : replicates) {
    if (!r.failed) probs.push_back(r.fit.predict(x));
  }
  if (probs.empty()) throw Error(Errc::AllReplicatesFailed, "ensemble has no fitted replicate");
  return aggregate_probabilities(probs);
}

Eigen::MatrixXd EnsembleModel::replicate_probabilities(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(n_successful()));
  Eigen::Index c = 0;
  for (const auto& r : replicates) {
    if (!r.failed) out.col(c++) = r.fit.predict(rows);
  }
  return out;
}

Eigen::VectorXd EnsembleModel::predict(const Eigen::MatrixXd& rows) const {
  const Eigen::MatrixXd probs = replicate_probabilities(rows);
  if (probs.cols() == 0) throw Error(Errc::AllReplicatesFailed, "ensemble has no fitted replicate");
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < probs.cols(); ++c) sum += probs(i, c);
    out(i) = sum / static_cast<double>(probs.cols());
  }
  return out;
}

double predict_aggregate(const EnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.predict(x);
}

namespace {

// Fits `design` after dropping columns that are zero on every positive-weight
// row (an individual whose rows were all resampled away); their coefficients
// are 0, i.e. the reference level.
FittedLogistic fit_present_columns(const DesignMatrix& design, const FitControl& control) {
  const Eigen::Index p = design.rows.cols();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < p; ++j) {
    bool present = false;
    for (Eigen::Index i = 0; i < design.rows.rows() && !present; ++i)
      present = design.weights(i) > 0.0 && design.rows(i, j) != 0.0;
    if (present) keep.push_back(j);
  }
  if (static_cast<Eigen::Index>(keep.size()) == p) return fit(design, control);

  DesignMatrix reduced;
  reduced.rows = design.rows(Eigen::placeholders::all, keep);
  reduced.response = design.response;
  reduced.weights = design.weights;
  FitControl c = control;
  if (c.start) {
    const Eigen::VectorXd start = *c.start;
    c.start = start(keep);
  }
  const FittedLogistic small = fit(reduced, c);
  FittedLogistic out = small;
  out.beta = Eigen::VectorXd::Zero(p);
  out.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    out.beta(keep[a]) = small.beta(static_cast<Eigen::Index>(a));
    for (std::size_t b = 0; b < keep.size(); ++b)
      out.covariance(keep[a], keep[b]) = small.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return out;
}

Replicate train_replicate(const DesignMatrix& design, const SamplerSpec& spec, std::size_t k, std::uint64_t seed,
                          const EnsembleOptions& options) {
  Replicate rep;
  rep.index = k;
  const int max_attempts = std::max(1, options.max_attempts);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    rep.attempts = attempt + 1;
    const RngStream rng(derive_seed(seed, {k, static_cast<std::uint64_t>(attempt)}));
    rep.seed = rng.seed();
    try {
      const ResampledSet set = apply_chain(design, spec, rng, options.distance);
      rep.stage_seeds = set.stage_seeds;
      rep.n_rows = set.size();
      rep.n_synthetic = set.synthetic_rows.size();
      FitControl control = options.control;
      if (!options.warm_starts.empty()) {
        const auto& start = options.warm_starts[k % options.warm_starts.size()];
        if (static_cast<std::size_t>(start.size()) == design.n_cols()) control.start = start;
      }
      rep.fit = spec.is_identity() ? fit(design, control) : fit_present_columns(materialize(design, set), control);
      rep.failed = false;
      rep.error.clear();
      return rep;
    } catch (const Error& e) {
      rep.failed = true;
      rep.error = e.what();
      const bool one_class = e.code() == Errc::AllOneClass || e.code() == Errc::EmptyClass;
      if (!one_class || spec.is_deterministic()) return rep;
    }
  }
  return rep;
}

}  // namespace

EnsembleModel train_ensemble(const DesignMatrix& design, const SamplerSpec& spec, std::size_t K, std::uint64_t seed,
                             const EnsembleOptions& options) {
  if (K < 1) throw Error(Errc::OutOfRange, "ensemble size K must be >= 1");
  EnsembleModel model;
  model.spec = spec;
  model.K = K;
  model.base_seed = seed;
  model.replicates.resize(K);

  if (spec.is_deterministic()) {
    // Every replicate would be identical; fit once.
    Replicate first = train_replicate(design, spec, 0, seed, options);
    for (std::size_t k = 0; k < K; ++k) {
      model.replicates[k] = first;
      model.replicates[k].index = k;
    }
  } else {
    parallel_for(K, options.jobs,
                 [&](std::size_t k) { model.replicates[k] = train_replicate(design, spec, k, seed, options); });
  }

  if (model.n_successful() == 0)
    throw Error(Errc::AllReplicatesFailed, "all " + std::to_string(K) + " replicates failed; first: " +
                                               model.replicates.front().error);
  return model;
}

nlohmann::json to_json(const EnsembleModel& model) {
  nlohmann::json doc;
  doc["spec"] = to_string(model.spec);
  doc["K"] = model.K;
  doc["base_seed"] = model.base_seed;
  doc["replicates"] = nlohmann::json::array();
  for (const auto& r : model.replicates) {
    nlohmann::json j;
    j["index"] = r.index;
    j["seed"] = r.seed;
    j["stage_seeds"] = r.stage_seeds;
    j["attempts"] = r.attempts;
    j["failed"] = r.failed;
    if (r.failed) {
      j["error"] = r.error;
    } else {
      j["beta"] = std::vector<double>(r.fit.beta.data(), r.fit.beta.data() + r.fit.beta.size());
      j["converged"] = r.fit.converged;
      j["iterations"] = r.fit.iterations;
      j["deviance"] = r.fit.final_deviance;
      j["separation"] = r.fit.separation_flag;
    }
    j["n_rows"] = r.n_rows;
    j["n_synthetic"] = r.n_synthetic;
    doc["replicates"].push_back(std::move(j));
  }
  return doc;
}

EnsembleModel ensemble_from_json(const nlohmann::json& doc) {
  EnsembleModel model;
  model.spec = parse_spec(doc.at("spec").get<std::string>());
  model.K = doc.at("K").get<std::size_t>();
  model.base_seed = doc.at("base_seed").get<std::uint64_t>();
  for (const auto& j : doc.at("replicates")) {
    Replicate r;
    r.index = j.at("index").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.stage_seeds = j.at("stage_seeds").get<std::vector<std::uint64_t>>();
    r.attempts = j.at("attempts").get<int>();
    r.failed = j.at("failed").get<bool>();
    r.n_rows = j.at("n_rows").get<std::size_t>();
    r.n_synthetic = j.at("n_synthetic").get<std::size_t>();
    if (r.failed) {
      r.error = j.at("error").get<std::string>();
    } else {
      const auto beta = j.at("beta").get<std::vector<double>>();
      r.fit.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
      r.fit.converged = j.at("converged").get<bool>();
      r.fit.iterations = j.at("iterations").get<int>();
      r.fit.final_deviance = j.at("deviance").get<double>();
      r.fit.separation_flag = j.at("separation").get<bool>();
    }
    model.replicates.push_back(std::move(r));
  }
  return model;
}

}  // namespace rarepred
