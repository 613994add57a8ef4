#include "rarepred/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rarepred/error.hpp"

namespace rarepred {

namespace {

bool is_event(const DesignMatrix& source, const ResampledSet& set, std::size_t entry) {
  if (entry < set.row_indices.size()) return source.response(static_cast<Eigen::Index>(set.row_indices[entry])) == 1.0;
  return true;
}

Eigen::VectorXd entry_features(const DesignMatrix& source, const ResampledSet& set, std::size_t entry) {
  if (entry < set.row_indices.size()) return source.rows.row(static_cast<Eigen::Index>(set.row_indices[entry])).transpose();
  return set.synthetic_rows[entry - set.row_indices.size()].features;
}

std::vector<std::size_t> entries_of_class(const DesignMatrix& source, const ResampledSet& set, bool events) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < set.size(); ++e) {
    if (is_event(source, set, e) == events) out.push_back(e);
  }
  return out;
}

// Keeps the entries flagged in `keep`, preserving order.
void retain(ResampledSet& set, const std::vector<bool>& keep) {
  std::vector<std::size_t> rows;
  std::vector<SyntheticRow> synth;
  const std::size_t n_rows = set.row_indices.size();
  for (std::size_t e = 0; e < keep.size(); ++e) {
    if (!keep[e]) continue;
    if (e < n_rows) {
      rows.push_back(set.row_indices[e]);
    } else {
      synth.push_back(std::move(set.synthetic_rows[e - n_rows]));
    }
  }
  set.row_indices = std::move(rows);
  set.synthetic_rows = std::move(synth);
}

// Appends copies of the listed entries.
void duplicate(ResampledSet& set, const std::vector<std::size_t>& entries) {
  const std::size_t n_rows = set.row_indices.size();
  std::vector<SyntheticRow> extra;
  for (std::size_t e : entries) {
    if (e < n_rows) {
      set.row_indices.push_back(set.row_indices[e]);
    } else {
      extra.push_back(set.synthetic_rows[e - n_rows]);
    }
  }
  for (auto& s : extra) set.synthetic_rows.push_back(std::move(s));
}

std::vector<std::size_t> distance_columns(const DesignMatrix& source, const DistanceOptions& opt) {
  std::vector<std::size_t> cols;
  const auto& kinds = source.encoding.column_kinds;
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    if (kinds[j] == ColumnKind::Covariate || (opt.include_all_columns && kinds[j] == ColumnKind::Individual))
      cols.push_back(j);
  }
  return cols;
}

std::vector<double> distance_scales(const DesignMatrix& source, const std::vector<std::size_t>& cols,
                                    const DistanceOptions& opt) {
  std::vector<double> scales(cols.size(), 1.0);
  if (!opt.standardize || source.rows.rows() < 2) return scales;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto col = source.rows.col(static_cast<Eigen::Index>(cols[c]));
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(col.size() - 1);
    if (var > 0.0) scales[c] = std::sqrt(var);
  }
  return scales;
}

// Points of `entries` in distance space, one row per entry.
Eigen::MatrixXd distance_points(const DesignMatrix& source, const ResampledSet& set,
                                const std::vector<std::size_t>& entries, const std::vector<std::size_t>& cols,
                                const std::vector<double>& scales) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(cols.size()));
  const std::size_t n_rows = set.row_indices.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::size_t e = entries[i];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = e < n_rows ? source.rows(static_cast<Eigen::Index>(set.row_indices[e]), static_cast<Eigen::Index>(cols[c]))
                                  : set.synthetic_rows[e - n_rows].features(static_cast<Eigen::Index>(cols[c]));
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v / scales[c];
    }
  }
  return pts;
}

double squared_distance(const Eigen::MatrixXd& pts, Eigen::Index i, Eigen::Index j) {
  return (pts.row(i) - pts.row(j)).squaredNorm();
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw Error(Errc::EmptyClass, std::string("no ") + what + " rows");
}

void stage_under(const DesignMatrix& source, ResampledSet& set, double r, RngStream& rng) {
  validate(SamplerStage::under(r));
  std::vector<std::size_t> majority = entries_of_class(source, set, false);
  require_nonempty(majority.size(), "majority");
  const std::size_t keep = undersample_target(majority.size(), r);
  // Partial Fisher-Yates: the first `keep` slots become a uniform sample.
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + rng.uniform_index(majority.size() - i);
    std::swap(majority[i], majority[j]);
  }
  std::vector<bool> flags(set.size(), true);
  for (std::size_t i = keep; i < majority.size(); ++i) flags[majority[i]] = false;
  retain(set, flags);
}

void stage_over(const DesignMatrix& source, ResampledSet& set, int a, int b, RngStream& rng) {
  validate(SamplerStage::over(a, b));
  const std::vector<std::size_t> minority = entries_of_class(source, set, true);
  const std::size_t n_majority = set.size() - minority.size();
  require_nonempty(n_majority, "majority");
  require_nonempty(minority.size(), "minority");
  const std::size_t target = oversample_target(n_majority, a, b);
  if (target < minority.size())
    throw Error(Errc::RatioWouldShrinkMinority, "ratio " + std::to_string(a) + ":" + std::to_string(b) + " targets " +
                                                    std::to_string(target) + " events but " +
                                                    std::to_string(minority.size()) + " are present");
  std::vector<std::size_t> extra(target - minority.size());
  for (auto& e : extra) e = minority[rng.uniform_index(minority.size())];
  duplicate(set, extra);
}

void stage_case_control(const DesignMatrix& source, ResampledSet& set, RngStream& rng) {
  const ClassCounts counts = class_counts(source, set);
  require_nonempty(counts.minority, "minority");
  require_nonempty(counts.majority, "majority");
  const double p = static_cast<double>(counts.minority) / static_cast<double>(counts.minority + counts.majority);
  stage_under(source, set, case_control_rate(p), rng);
}

void stage_smote(const DesignMatrix& source, ResampledSet& set, int k, int m, RngStream& rng,
                 const DistanceOptions& opt) {
  validate(SamplerStage::smote(k, m));
  const std::vector<std::size_t> minority = entries_of_class(source, set, true);
  if (minority.size() < 2) throw Error(Errc::TooFewMinority, "SMOTE needs at least two events");
  if (static_cast<std::size_t>(k) > minority.size() - 1)
    throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " but only " + std::to_string(minority.size()) +
                                     " events are present");
  const auto cols = distance_columns(source, opt);
  const auto scales = distance_scales(source, cols, opt);
  const Eigen::MatrixXd pts = distance_points(source, set, minority, cols, scales);

  // Columns that are interpolated; everything else is copied from the parent.
  std::vector<Eigen::Index> interp;
  for (std::size_t c : cols) interp.push_back(static_cast<Eigen::Index>(c));

  const auto n = static_cast<Eigen::Index>(minority.size());
  std::vector<SyntheticRow> created;
  created.reserve(minority.size() * static_cast<std::size_t>(m));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      dist[static_cast<std::size_t>(j)] = squared_distance(pts, i, j);
      order.push_back(j);
    }
    // k nearest, ties to the lower index.
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double da = dist[static_cast<std::size_t>(a)];
      const double db = dist[static_cast<std::size_t>(b)];
      return da != db ? da < db : a < b;
    });
    const Eigen::VectorXd parent = entry_features(source, set, minority[static_cast<std::size_t>(i)]);
    for (int rep = 0; rep < m; ++rep) {
      const Eigen::Index nn = order[rng.uniform_index(static_cast<std::size_t>(k))];
      const double u = rng.uniform01();
      SyntheticRow row;
      row.parent = parent;
      row.neighbour = entry_features(source, set, minority[static_cast<std::size_t>(nn)]);
      row.u = u;
      row.features = parent;
      for (Eigen::Index c : interp) row.features(c) = parent(c) + u * (row.neighbour(c) - parent(c));
      created.push_back(std::move(row));
    }
  }
  for (auto& row : created) set.synthetic_rows.push_back(std::move(row));
}

void stage_tomek(const DesignMatrix& source, ResampledSet& set, const DistanceOptions& opt) {
  const ClassCounts counts = class_counts(source, set);
  require_nonempty(counts.minority, "minority");
  require_nonempty(counts.majority, "majority");
  std::vector<std::size_t> all(set.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto cols = distance_columns(source, opt);
  const auto scales = distance_scales(source, cols, opt);
  const Eigen::MatrixXd pts = distance_points(source, set, all, cols, scales);
  const auto n = static_cast<Eigen::Index>(all.size());

  std::vector<Eigen::Index> nearest(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = squared_distance(pts, i, j);
      if (d < best) {
        best = d;
        nearest[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  std::vector<bool> keep(all.size(), true);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (is_event(source, set, ui)) continue;
    const Eigen::Index j = nearest[ui];
    if (j >= 0 && is_event(source, set, static_cast<std::size_t>(j)) && nearest[static_cast<std::size_t>(j)] == i)
      keep[ui] = false;
  }
  retain(set, keep);
}

void stage_bootstrap(const DesignMatrix& source, ResampledSet& set, BootstrapTarget which, RngStream& rng) {
  auto resample_class = [&](bool events) {
    const std::vector<std::size_t> members = entries_of_class(source, set, events);
    require_nonempty(members.size(), events ? "minority" : "majority");
    std::vector<std::size_t> drawn(members.size());
    for (auto& e : drawn) e = members[rng.uniform_index(members.size())];
    return std::pair{members, drawn};
  };
  std::vector<bool> keep(set.size(), true);
  std::vector<std::size_t> additions;
  auto apply = [&](bool events) {
    auto [members, drawn] = resample_class(events);
    for (std::size_t e : members) keep[e] = false;
    additions.insert(additions.end(), drawn.begin(), drawn.end());
  };
  if (which == BootstrapTarget::Majority || which == BootstrapTarget::Stratified) apply(false);
  if (which == BootstrapTarget::Minority || which == BootstrapTarget::Stratified) apply(true);

  // Draws reference the pre-bootstrap entry numbering: rebuild from scratch.
  ResampledSet next;
  const std::size_t n_rows = set.row_indices.size();
  for (std::size_t e = 0; e < set.size(); ++e) {
    if (!keep[e]) continue;
    if (e < n_rows) next.row_indices.push_back(set.row_indices[e]);
    else next.synthetic_rows.push_back(set.synthetic_rows[e - n_rows]);
  }
  for (std::size_t e : additions) {
    if (e < n_rows) next.row_indices.push_back(set.row_indices[e]);
    else next.synthetic_rows.push_back(set.synthetic_rows[e - n_rows]);
  }
  set.row_indices = std::move(next.row_indices);
  set.synthetic_rows = std::move(next.synthetic_rows);
}

void apply_stage(const DesignMatrix& source, ResampledSet& set, const SamplerStage& stage, RngStream& rng,
                 const DistanceOptions& opt) {
  switch (stage.kind) {
    case SamplerKind::UnderRandom: stage_under(source, set, stage.rate, rng); break;
    case SamplerKind::OverRandom: stage_over(source, set, stage.a, stage.b, rng); break;
    case SamplerKind::CaseControl: stage_case_control(source, set, rng); break;
    case SamplerKind::Smote: stage_smote(source, set, stage.k, stage.m, rng, opt); break;
    case SamplerKind::TomekClean: stage_tomek(source, set, opt); break;
    case SamplerKind::BootstrapMajority: stage_bootstrap(source, set, BootstrapTarget::Majority, rng); break;
    case SamplerKind::BootstrapMinority: stage_bootstrap(source, set, BootstrapTarget::Minority, rng); break;
    case SamplerKind::BootstrapStratified: stage_bootstrap(source, set, BootstrapTarget::Stratified, rng); break;
  }
}

ResampledSet single_stage(const DesignMatrix& source, const SamplerStage& stage, RngStream& rng,
                          const DistanceOptions& opt = {}) {
  ResampledSet set = identity_set(source);
  set.spec.chain = {stage};
  set.seed = rng.seed();
  set.stage_seeds = {rng.seed()};
  apply_stage(source, set, stage, rng, opt);
  return set;
}

}  // namespace

std::vector<std::size_t> ResampledSet::multiplicities(std::size_t n_source) const {
  std::vector<std::size_t> counts(n_source, 0);
  for (std::size_t i : row_indices) ++counts[i];
  return counts;
}

ClassCounts class_counts(const DesignMatrix& source, const ResampledSet& set) {
  ClassCounts c;
  for (std::size_t i : set.row_indices) {
    if (source.response(static_cast<Eigen::Index>(i)) == 1.0) ++c.minority;
    else ++c.majority;
  }
  c.minority += set.synthetic_rows.size();
  return c;
}

std::size_t target_count(double value) {
  // Rates arrive as decimals (0.3 is not exact in binary), so a product that
  // is a half in exact arithmetic can land a few ulps below it; such values
  // still round up.
  const double lower = std::floor(value);
  const double frac = value - lower;
  double r = std::round(value);
  if (std::abs(frac - 0.5) <= 1e-9 * std::max(1.0, std::abs(value))) r = lower + 1.0;
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

std::size_t undersample_target(std::size_t n_majority, double r) {
  return target_count((1.0 - r) * static_cast<double>(n_majority));
}

std::size_t oversample_target(std::size_t n_majority, int a, int b) {
  // round(n * b / a), half away from zero, on integers.
  const std::uint64_t num = static_cast<std::uint64_t>(n_majority) * static_cast<std::uint64_t>(b);
  const std::uint64_t den = static_cast<std::uint64_t>(a);
  const std::uint64_t rounded = (2 * num + den) / (2 * den);
  return rounded < 1 ? 1 : static_cast<std::size_t>(rounded);
}

ResampledSet identity_set(const DesignMatrix& source) {
  ResampledSet set;
  set.row_indices.resize(source.n_rows());
  std::iota(set.row_indices.begin(), set.row_indices.end(), std::size_t{0});
  return set;
}

ResampledSet undersample_random(const DesignMatrix& source, double r, RngStream& rng) {
  return single_stage(source, SamplerStage::under(r), rng);
}

double case_control_rate(double p) {
  if (!(p > 0.0 && p <= 0.5)) throw Error(Errc::OutOfRange, "event share must lie in (0, 0.5]");
  return (1.0 - 2.0 * p) / (1.0 - p);
}

ResampledSet case_control(const DesignMatrix& source, RngStream& rng) {
  return single_stage(source, SamplerStage::case_control(), rng);
}

ResampledSet oversample_random(const DesignMatrix& source, int a, int b, RngStream& rng) {
  return single_stage(source, SamplerStage::over(a, b), rng);
}

ResampledSet smote(const DesignMatrix& source, int k, int m, RngStream& rng, const DistanceOptions& distance) {
  return single_stage(source, SamplerStage::smote(k, m), rng, distance);
}

ResampledSet tomek_clean(const DesignMatrix& source, const DistanceOptions& distance) {
  RngStream unused(0);
  ResampledSet set = single_stage(source, SamplerStage::tomek(), unused, distance);
  set.seed = 0;
  set.stage_seeds = {0};
  return set;
}

ResampledSet bootstrap_class(const DesignMatrix& source, BootstrapTarget which, RngStream& rng) {
  switch (which) {
    case BootstrapTarget::Majority: return single_stage(source, SamplerStage::boot_majority(), rng);
    case BootstrapTarget::Minority: return single_stage(source, SamplerStage::boot_minority(), rng);
    case BootstrapTarget::Stratified: break;
  }
  return single_stage(source, SamplerStage::boot_stratified(), rng);
}

ResampledSet apply_chain(const DesignMatrix& source, const SamplerSpec& spec, const RngStream& rng,
                         const DistanceOptions& distance) {
  ResampledSet set = identity_set(source);
  set.spec = spec;
  set.seed = rng.seed();
  set.warnings = order_warnings(spec);
  for (std::size_t s = 0; s < spec.chain.size(); ++s) {
    RngStream stage_rng = rng.child({s});
    set.stage_seeds.push_back(stage_rng.seed());
    apply_stage(source, set, spec.chain[s], stage_rng, distance);
  }
  return set;
}

namespace {

DesignMatrix with_synthetic(const DesignMatrix& source, const ResampledSet& set, std::vector<std::size_t> rows,
                            std::vector<double> weights) {
  const auto n_src = static_cast<Eigen::Index>(rows.size());
  const auto n = n_src + static_cast<Eigen::Index>(set.synthetic_rows.size());
  DesignMatrix d;
  d.encoding = source.encoding;
  d.rows.resize(n, source.rows.cols());
  d.response.resize(n);
  d.weights.resize(n);
  d.record_indices.reserve(static_cast<std::size_t>(n));
  d.unseen_individual.assign(static_cast<std::size_t>(n), false);
  constexpr std::size_t kNoRecord = static_cast<std::size_t>(-1);
  for (Eigen::Index r = 0; r < n_src; ++r) {
    const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
    d.rows.row(r) = source.rows.row(i);
    d.response(r) = source.response(i);
    d.weights(r) = weights[static_cast<std::size_t>(r)];
    d.record_indices.push_back(source.record_indices.empty() ? kNoRecord
                                                             : source.record_indices[static_cast<std::size_t>(i)]);
  }
  for (std::size_t s = 0; s < set.synthetic_rows.size(); ++s) {
    const auto r = n_src + static_cast<Eigen::Index>(s);
    d.rows.row(r) = set.synthetic_rows[s].features.transpose();
    d.response(r) = 1.0;
    d.weights(r) = 1.0;
    d.record_indices.push_back(kNoRecord);
  }
  return d;
}

}  // namespace

DesignMatrix materialize(const DesignMatrix& source, const ResampledSet& set) {
  const auto mult = set.multiplicities(source.n_rows());
  std::vector<std::size_t> rows;
  std::vector<double> weights;
  for (std::size_t i = 0; i < mult.size(); ++i) {
    if (mult[i] == 0) continue;
    rows.push_back(i);
    weights.push_back(static_cast<double>(mult[i]) * source.weights(static_cast<Eigen::Index>(i)));
  }
  return with_synthetic(source, set, std::move(rows), std::move(weights));
}

DesignMatrix materialize_expanded(const DesignMatrix& source, const ResampledSet& set) {
  std::vector<double> weights;
  weights.reserve(set.row_indices.size());
  for (std::size_t i : set.row_indices) weights.push_back(source.weights(static_cast<Eigen::Index>(i)));
  return with_synthetic(source, set, set.row_indices, std::move(weights));
}

}  // namespace rarepred
