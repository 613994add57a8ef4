#include "rarepred/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rarepred/error.hpp"

namespace rarepred {

std::vector<std::size_t> Encoding::covariate_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < column_kinds.size(); ++j) {
    if (column_kinds[j] == ColumnKind::Covariate) out.push_back(j);
  }
  return out;
}

std::size_t DesignMatrix::count_unseen() const {
  return static_cast<std::size_t>(std::count(unseen_individual.begin(), unseen_individual.end(), true));
}

DesignMatrix DesignMatrix::from_arrays(Eigen::MatrixXd features, Eigen::VectorXd response) {
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(features.rows());
  return from_arrays(std::move(features), std::move(response), std::move(weights));
}

DesignMatrix DesignMatrix::from_arrays(Eigen::MatrixXd features, Eigen::VectorXd response,
                                       Eigen::VectorXd weights) {
  if (features.rows() != response.size() || features.rows() != weights.size())
    throw Error(Errc::DimensionMismatch, "features, response and weights disagree on row count");
  if (features.cols() < 1) throw Error(Errc::DimensionMismatch, "design needs an intercept column");
  DesignMatrix d;
  d.encoding.column_names.push_back("(intercept)");
  d.encoding.column_kinds.push_back(ColumnKind::Intercept);
  for (Eigen::Index j = 1; j < features.cols(); ++j) {
    const std::string name = "cov" + std::to_string(j);
    d.encoding.column_names.push_back(name);
    d.encoding.column_kinds.push_back(ColumnKind::Covariate);
    d.encoding.covariate_names.push_back(name);
    d.encoding.center.push_back(0.0);
    d.encoding.scale.push_back(1.0);
  }
  d.rows = std::move(features);
  d.response = std::move(response);
  d.weights = std::move(weights);
  d.unseen_individual.assign(static_cast<std::size_t>(d.rows.rows()), false);
  return d;
}

DesignMatrix encode(const Panel& panel, std::span<const std::size_t> subset, const EncodeOptions& options) {
  if (subset.empty()) throw Error(Errc::EmptySubset, "cannot encode an empty subset");

  Encoding enc;
  enc.covariate_names = panel.schema();
  const std::size_t k = enc.covariate_names.size();
  enc.center.assign(k, 0.0);
  enc.scale.assign(k, 1.0);
  if (options.standardize) {
    const double n = static_cast<double>(subset.size());
    for (std::size_t j = 0; j < k; ++j) {
      double mean = 0.0;
      for (std::size_t i : subset) mean += panel[i].covariates[j];
      mean /= n;
      double ss = 0.0;
      for (std::size_t i : subset) ss += (panel[i].covariates[j] - mean) * (panel[i].covariates[j] - mean);
      const double sd = subset.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      enc.center[j] = mean;
      enc.scale[j] = sd > 0.0 ? sd : 1.0;
    }
  }

  enc.column_names.push_back("(intercept)");
  enc.column_kinds.push_back(ColumnKind::Intercept);
  for (const auto& name : enc.covariate_names) {
    enc.column_names.push_back(name);
    enc.column_kinds.push_back(ColumnKind::Covariate);
  }

  if (options.individual_effects) {
    std::set<std::string> ids;
    for (std::size_t i : subset) ids.insert(panel[i].individual_id);
    switch (options.reference_policy) {
      case ReferencePolicy::Lexicographic:
        enc.reference = *ids.begin();
        break;
      case ReferencePolicy::FirstSeen:
        enc.reference = panel[*std::min_element(subset.begin(), subset.end())].individual_id;
        break;
      case ReferencePolicy::Named:
        if (!ids.count(options.reference_id))
          throw Error(Errc::SchemaMismatch, "reference individual '" + options.reference_id + "' not in subset");
        enc.reference = options.reference_id;
        break;
    }
    for (const auto& id : ids) {
      if (id == enc.reference) {
        enc.encoding_map[id] = -1;
        continue;
      }
      enc.encoding_map[id] = static_cast<std::ptrdiff_t>(enc.column_names.size());
      enc.column_names.push_back("id[" + id + "]");
      enc.column_kinds.push_back(ColumnKind::Individual);
    }
  }

  return encode_with(enc, panel, subset);
}

DesignMatrix encode_with(const Encoding& encoding, const Panel& panel, std::span<const std::size_t> subset) {
  const auto n = static_cast<Eigen::Index>(subset.size());
  const auto p = static_cast<Eigen::Index>(encoding.n_columns());
  const std::size_t k = encoding.covariate_names.size();
  if (k != panel.schema().size()) throw Error(Errc::SchemaMismatch, "encoding and panel schemas differ");
  const bool with_ids = !encoding.reference.empty();

  DesignMatrix d;
  d.encoding = encoding;
  d.rows = Eigen::MatrixXd::Zero(n, p);
  d.response.resize(n);
  d.weights = Eigen::VectorXd::Ones(n);
  d.record_indices.assign(subset.begin(), subset.end());
  d.unseen_individual.assign(subset.size(), false);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& rec = panel[subset[static_cast<std::size_t>(r)]];
    d.rows(r, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j)
      d.rows(r, static_cast<Eigen::Index>(j + 1)) = (rec.covariates[j] - encoding.center[j]) / encoding.scale[j];
    if (with_ids) {
      auto it = encoding.encoding_map.find(rec.individual_id);
      if (it == encoding.encoding_map.end()) {
        d.unseen_individual[static_cast<std::size_t>(r)] = true;
      } else if (it->second >= 0) {
        d.rows(r, it->second) = 1.0;
      }
    }
    d.response(r) = rec.outcome;
  }
  return d;
}

}  // namespace rarepred
