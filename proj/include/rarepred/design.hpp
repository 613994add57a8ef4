#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rarepred/panel.hpp"

namespace rarepred {

enum class ColumnKind { Intercept, Covariate, Individual };

enum class ReferencePolicy {
  Lexicographic,  // smallest id in the encoded subset
  FirstSeen,      // id of the first record of the subset (panel order)
  Named,          // EncodeOptions::reference_id
};

struct EncodeOptions {
  ReferencePolicy reference_policy = ReferencePolicy::Lexicographic;
  std::string reference_id;
  // z-score covariates with statistics of the encoded (training) subset only.
  bool standardize = false;
  // Drop the individual fixed-effect block entirely.
  bool individual_effects = true;
};

// Column layout learned from a training subset. Later rows are encoded against
// it, so statistics and dummy columns never depend on data outside that subset.
struct Encoding {
  std::vector<std::string> column_names;
  std::vector<ColumnKind> column_kinds;
  std::vector<std::string> covariate_names;
  std::string reference;
  // Individual id -> column index; the reference level maps to -1.
  std::map<std::string, std::ptrdiff_t> encoding_map;
  std::vector<double> center;
  std::vector<double> scale;

  std::size_t n_columns() const noexcept { return column_names.size(); }
  bool knows(const std::string& id) const { return encoding_map.count(id) != 0; }
  // Columns holding numeric covariates (no intercept, no dummies).
  std::vector<std::size_t> covariate_columns() const;
};

struct DesignMatrix {
  Eigen::MatrixXd rows;        // n x p, first column identically 1
  Eigen::VectorXd response;    // 0/1
  Eigen::VectorXd weights;     // non-negative, default 1
  Encoding encoding;
  std::vector<std::size_t> record_indices;  // panel rows, empty when built from raw arrays
  // Set when the row's individual was not in the encoding (dummy block all zero).
  std::vector<bool> unseen_individual;

  std::size_t n_rows() const noexcept { return static_cast<std::size_t>(rows.rows()); }
  std::size_t n_cols() const noexcept { return static_cast<std::size_t>(rows.cols()); }
  const std::vector<std::string>& column_names() const noexcept { return encoding.column_names; }
  std::size_t count_unseen() const;

  // Design from raw arrays. `features` must already carry the intercept column;
  // the remaining columns are labelled cov1..covk.
  static DesignMatrix from_arrays(Eigen::MatrixXd features, Eigen::VectorXd response);
  static DesignMatrix from_arrays(Eigen::MatrixXd features, Eigen::VectorXd response, Eigen::VectorXd weights);
};

// Learns the encoding from `subset` and encodes those records.
DesignMatrix encode(const Panel& panel, std::span<const std::size_t> subset, const EncodeOptions& options);

// Encodes records against a previously learned encoding. Rows whose individual
// is unknown get an all-zero dummy block and unseen_individual = true.
DesignMatrix encode_with(const Encoding& encoding, const Panel& panel, std::span<const std::size_t> subset);

}  // namespace rarepred
