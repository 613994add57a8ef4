#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rarepred/panel.hpp"

namespace rarepred {

// A predicted probability paired with the observed outcome.
struct ScoredPair {
  double score = 0.0;
  int outcome = 0;
  TimeIndex time_index = 0;
  std::string individual_id;
};

std::vector<ScoredPair> make_pairs(std::span<const double> scores, std::span<const int> outcomes);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Predicts 1 when score >= gamma.
Confusion confusion(std::span<const ScoredPair> pairs, double gamma);

struct SensSpec {
  double sensitivity = 0.0;  // TP / (TP + FN)
  double specificity = 0.0;  // TN / (TN + FP)
  bool sensitivity_degenerate = false;  // no events: value reported as 0
  bool specificity_degenerate = false;  // no non-events: value reported as 0
};

SensSpec sens_spec(const Confusion& counts);

// ROC vertices, from the +inf threshold (0, 0) down through every distinct
// score in decreasing order. The lowest score already yields (1, 1), which is
// also the -inf vertex, so it is not repeated.
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> fpr;  // 1 - specificity
  std::vector<double> tpr;  // sensitivity
  // Integer counts behind each vertex.
  std::vector<std::size_t> tp;
  std::vector<std::size_t> fp;
  std::size_t positives = 0;
  std::size_t negatives = 0;

  std::size_t size() const noexcept { return thresholds.size(); }
};

RocCurve roc(std::span<const ScoredPair> pairs);

// Trapezoidal area under the ROC curve (equals the Mann-Whitney concordance).
double auc(std::span<const ScoredPair> pairs);
double auc(const RocCurve& curve);

struct PeirceResult {
  double index = 0.0;       // max over thresholds of sensitivity + specificity - 1
  double gamma_star = 0.0;  // smallest threshold achieving the maximum
  double sensitivity = 0.0;
  double specificity = 0.0;
};

PeirceResult peirce(std::span<const ScoredPair> pairs);
PeirceResult peirce(const RocCurve& curve);

// Minimum Manhattan distance from (0, 1) to the ROC vertices.
double min_manhattan_distance(const RocCurve& curve);

// CSV with columns threshold,fpr,tpr.
void write_roc_csv(std::ostream& out, const RocCurve& curve);

}  // namespace rarepred
