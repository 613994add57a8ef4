#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rarepred/design.hpp"
#include "rarepred/random.hpp"
#include "rarepred/sampler_spec.hpp"

namespace rarepred {

// Which columns enter nearest-neighbour distances (SMOTE, Tomek links).
struct DistanceOptions {
  // false: numeric covariates only; true: every column except the intercept.
  bool include_all_columns = false;
  // Divide each distance column by its standard deviation over the source rows.
  bool standardize = false;
};

// A SMOTE point together with the two points it interpolates.
struct SyntheticRow {
  Eigen::VectorXd features;
  Eigen::VectorXd parent;     // the event the point was generated from
  Eigen::VectorXd neighbour;  // the chosen minority neighbour
  double u = 0.0;             // features = parent + u (neighbour - parent) on distance columns
};

// Result of resampling a source design. Entries [0, row_indices.size()) refer
// to source rows (with multiplicity); synthetic rows always carry outcome 1.
struct ResampledSet {
  std::vector<std::size_t> row_indices;
  std::vector<SyntheticRow> synthetic_rows;
  SamplerSpec spec;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> stage_seeds;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return row_indices.size() + synthetic_rows.size(); }
  // Multiplicity of every source row.
  std::vector<std::size_t> multiplicities(std::size_t n_source) const;
};

struct ClassCounts {
  std::size_t majority = 0;  // y = 0
  std::size_t minority = 0;  // y = 1
};

ClassCounts class_counts(const DesignMatrix& source, const ResampledSet& set);

// round-half-away-from-zero, floored at 1.
std::size_t target_count(double value);
// Majority rows kept by undersampling at rate r.
std::size_t undersample_target(std::size_t n_majority, double r);
// Minority rows after (a:b) oversampling, computed in exact integer arithmetic.
std::size_t oversample_target(std::size_t n_majority, int a, int b);

// Every source row exactly once.
ResampledSet identity_set(const DesignMatrix& source);

ResampledSet undersample_random(const DesignMatrix& source, double r, RngStream& rng);

// Undersampling rate (1 - 2p) / (1 - p) that balances a sample with event share p.
double case_control_rate(double p);
ResampledSet case_control(const DesignMatrix& source, RngStream& rng);

ResampledSet oversample_random(const DesignMatrix& source, int a, int b, RngStream& rng);

ResampledSet smote(const DesignMatrix& source, int k, int m, RngStream& rng, const DistanceOptions& distance = {});

ResampledSet tomek_clean(const DesignMatrix& source, const DistanceOptions& distance = {});

enum class BootstrapTarget { Majority, Minority, Stratified };
ResampledSet bootstrap_class(const DesignMatrix& source, BootstrapTarget which, RngStream& rng);

// Applies the stages left to right; stage s draws from rng.child({s}).
ResampledSet apply_chain(const DesignMatrix& source, const SamplerSpec& spec, const RngStream& rng,
                         const DistanceOptions& distance = {});

// Design for fitting: duplicated source rows become integer weights
// (times the source weight), unused rows are dropped, synthetic rows are
// appended with weight 1.
DesignMatrix materialize(const DesignMatrix& source, const ResampledSet& set);

// Same rows, but every duplicate is written out explicitly with its source weight.
DesignMatrix materialize_expanded(const DesignMatrix& source, const ResampledSet& set);

}  // namespace rarepred
