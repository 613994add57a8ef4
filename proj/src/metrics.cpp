#include "rarepred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "rarepred/error.hpp"

namespace rarepred {

std::vector<ScoredPair> make_pairs(std::span<const double> scores, std::span<const int> outcomes) {
  if (scores.size() != outcomes.size()) throw Error(Errc::DimensionMismatch, "scores and outcomes differ in length");
  std::vector<ScoredPair> pairs(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    pairs[i].score = scores[i];
    pairs[i].outcome = outcomes[i];
  }
  return pairs;
}

Confusion confusion(std::span<const ScoredPair> pairs, double gamma) {
  if (pairs.empty()) throw Error(Errc::EmptyInput, "no scored pairs");
  Confusion c;
  for (const auto& p : pairs) {
    const bool predicted = p.score >= gamma;
    if (p.outcome == 1) {
      if (predicted) ++c.tp;
      else ++c.fn;
    } else {
      if (predicted) ++c.fp;
      else ++c.tn;
    }
  }
  return c;
}

SensSpec sens_spec(const Confusion& counts) {
  SensSpec s;
  if (counts.tp + counts.fn > 0) {
    s.sensitivity = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
  } else {
    s.sensitivity_degenerate = true;
  }
  if (counts.tn + counts.fp > 0) {
    s.specificity = static_cast<double>(counts.tn) / static_cast<double>(counts.tn + counts.fp);
  } else {
    s.specificity_degenerate = true;
  }
  return s;
}

RocCurve roc(std::span<const ScoredPair> pairs) {
  RocCurve curve;
  for (const auto& p : pairs) {
    if (!std::isfinite(p.score)) throw Error(Errc::OutOfRange, "non-finite score");
    if (p.outcome == 1) ++curve.positives;
    else ++curve.negatives;
  }
  if (curve.positives == 0 || curve.negatives == 0)
    throw Error(Errc::OneClassOnly, "ROC needs at least one event and one non-event");

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].score > pairs[b].score; });

  const double pos = static_cast<double>(curve.positives);
  const double neg = static_cast<double>(curve.negatives);
  auto push = [&](double threshold, std::size_t tp, std::size_t fp) {
    curve.thresholds.push_back(threshold);
    curve.tp.push_back(tp);
    curve.fp.push_back(fp);
    curve.tpr.push_back(static_cast<double>(tp) / pos);
    curve.fpr.push_back(static_cast<double>(fp) / neg);
  };
  push(std::numeric_limits<double>::infinity(), 0, 0);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = pairs[order[i]].score;
    while (i < order.size() && pairs[order[i]].score == s) {
      if (pairs[order[i]].outcome == 1) ++tp;
      else ++fp;
      ++i;
    }
    push(s, tp, fp);
  }
  return curve;
}

double auc(const RocCurve& curve) {
  // Twice the trapezoid area in count units: sum dFP * (TP_prev + TP_next).
  long double twice_area = 0.0L;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto dfp = static_cast<long double>(curve.fp[i] - curve.fp[i - 1]);
    twice_area += dfp * static_cast<long double>(curve.tp[i] + curve.tp[i - 1]);
  }
  return static_cast<double>(twice_area / (2.0L * static_cast<long double>(curve.positives) *
                                           static_cast<long double>(curve.negatives)));
}

double auc(std::span<const ScoredPair> pairs) { return auc(roc(pairs)); }

PeirceResult peirce(const RocCurve& curve) {
  PeirceResult best;
  // tpr - fpr = (tp N - fp P) / (P N): ties are decided on the integer numerator
  // so that equal rationals compare equal.
  const auto pos = static_cast<long long>(curve.positives);
  const auto neg = static_cast<long long>(curve.negatives);
  long long best_num = std::numeric_limits<long long>::min();
  // Vertices run from high to low thresholds; ">=" keeps the smallest on ties.
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const long long num = static_cast<long long>(curve.tp[i]) * neg - static_cast<long long>(curve.fp[i]) * pos;
    if (num >= best_num) {
      best_num = num;
      best.index = curve.tpr[i] - curve.fpr[i];
      best.gamma_star = curve.thresholds[i];
      best.sensitivity = curve.tpr[i];
      best.specificity = static_cast<double>(curve.negatives - curve.fp[i]) / static_cast<double>(curve.negatives);
    }
  }
  return best;
}

PeirceResult peirce(std::span<const ScoredPair> pairs) { return peirce(roc(pairs)); }

double min_manhattan_distance(const RocCurve& curve) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.size(); ++i) best = std::min(best, curve.fpr[i] + (1.0 - curve.tpr[i]));
  return best;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double t = curve.thresholds[i];
    out << (std::isinf(t) ? std::string(t > 0 ? "inf" : "-inf") : format_double(t)) << ','
        << format_double(curve.fpr[i]) << ',' << format_double(curve.tpr[i]) << '\n';
  }
}

}  // namespace rarepred
