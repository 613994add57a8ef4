// Acceptance suite: one PASS/FAIL line per criterion. Arguments select a subset
// of criteria by number; no arguments runs all of them.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "rarepred/error.hpp"
#include "rarepred/experiment.hpp"
#include "rarepred/logistic.hpp"
#include "rarepred/random.hpp"
#include "rarepred/resampling.hpp"
#include "rarepred/synth.hpp"
#include "rarepred/validation.hpp"

using namespace rarepred;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Score/label sets with heavy ties; both classes present.
std::vector<std::vector<ScoredPair>> metric_sets() {
  RngStream rng(20240601);
  std::vector<std::vector<ScoredPair>> sets;
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = 2 + rng.uniform_index(199);
    const std::size_t levels = 1 + rng.uniform_index(30);
    const double p_event = 0.02 + 0.5 * rng.uniform01();
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      const bool coarse = rng.uniform01() < 0.5;
      scores.push_back(coarse ? static_cast<double>(rng.uniform_index(levels)) / static_cast<double>(levels)
                              : rng.uniform01());
      labels.push_back(i == 0 ? 1 : i == 1 ? 0 : (rng.uniform01() < p_event ? 1 : 0));
    }
    sets.push_back(make_pairs(scores, labels));
  }
  return sets;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_auc = 0.0, worst_pi = 0.0;
  std::size_t gamma_mismatch = 0;
  for (const auto& pairs : metric_sets()) {
    worst_auc = std::max(worst_auc, std::abs(auc(pairs) - oracle::mann_whitney(pairs)));
    const auto got = peirce(pairs);
    const auto want = oracle::exhaustive_peirce(pairs);
    worst_pi = std::max(worst_pi, std::abs(got.index - want.index));
    // The chosen thresholds must classify identically (the lowest score and
    // -inf both predict every record positive).
    if (!(confusion(pairs, got.gamma_star) == confusion(pairs, want.gamma))) ++gamma_mismatch;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_auc <= 1e-12 && worst_pi <= 1e-12 && gamma_mismatch == 0 && secs < 30.0,
          fmt("1000 sets: max |AUC - MW| = %.2e, max |PI - sweep| = %.2e, threshold mismatches %zu, %.1fs",
              worst_auc, worst_pi, gamma_mismatch, secs)};
}

Outcome criterion2() {
  double worst = 0.0;
  for (const auto& pairs : metric_sets()) {
    // Distance to (0, 1) computed from direct counts at every candidate threshold.
    std::vector<double> gammas = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pairs) gammas.push_back(p.score);
    double d_star = std::numeric_limits<double>::infinity();
    for (double g : gammas) {
      const Confusion c = confusion(pairs, g);
      const double fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
      const double tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
      d_star = std::min(d_star, fpr + (1.0 - tpr));
    }
    worst = std::max(worst, std::abs(peirce(pairs).index - (1.0 - d_star)));
  }
  return {worst <= 1e-12, fmt("1000 sets: max |PI - (1 - d*)| = %.2e", worst)};
}

DesignMatrix random_design(RngStream& rng, std::size_t n, std::size_t k, double effect) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = 1.0;
    double eta = -0.5;
    for (Eigen::Index j = 1; j < x.cols(); ++j) {
      x(i, j) = rng.normal();
      eta += effect * x(i, j);
    }
    y(i) = rng.uniform01() < sigmoid(eta) ? 1.0 : 0.0;
  }
  return DesignMatrix::from_arrays(x, y);
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(303);
  double worst = 0.0;
  std::size_t redraws = 0, done = 0;
  while (done < 200) {
    const std::size_t n = 15 + rng.uniform_index(40);
    const DesignMatrix d = random_design(rng, n, 1 + rng.uniform_index(4), 0.7);
    Eigen::VectorXd w(d.rows.rows());
    std::vector<Eigen::Index> expanded;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w(i) = static_cast<double>(rng.uniform_index(6));  // 0..5
      for (int c = 0; c < static_cast<int>(w(i)); ++c) expanded.push_back(i);
    }
    Eigen::MatrixXd xe(static_cast<Eigen::Index>(expanded.size()), d.rows.cols());
    Eigen::VectorXd ye(static_cast<Eigen::Index>(expanded.size()));
    for (std::size_t r = 0; r < expanded.size(); ++r) {
      xe.row(static_cast<Eigen::Index>(r)) = d.rows.row(expanded[r]);
      ye(static_cast<Eigen::Index>(r)) = d.response(expanded[r]);
    }
    try {
      const auto weighted = fit(DesignMatrix::from_arrays(d.rows, d.response, w));
      if (weighted.separation_flag) {
        ++redraws;  // no finite maximum to compare
        continue;
      }
      const auto dup = fit(DesignMatrix::from_arrays(xe, ye));
      worst = std::max(worst, (weighted.beta - dup.beta).cwiseAbs().maxCoeff());
      ++done;
    } catch (const Error&) {
      ++redraws;  // one class or collinear after weighting
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-8 && secs < 60.0,
          fmt("200 designs (%zu redrawn): max |beta_w - beta_dup| = %.2e, %.1fs", redraws, worst, secs)};
}

DesignMatrix class_design(std::size_t n_maj, std::size_t n_min) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n_maj + n_min), 2);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(i);
    y(i) = static_cast<std::size_t>(i) < n_maj ? 0.0 : 1.0;
  }
  return DesignMatrix::from_arrays(x, y);
}

Outcome criterion4() {
  RngStream rng(404);
  std::size_t cases = 0, mismatches = 0, rejected = 0;
  std::string first;
  for (int c = 0; c < 3000; ++c) {
    const std::size_t n_maj = 1 + rng.uniform_index(500);
    const std::size_t n_min = 1 + rng.uniform_index(20);
    const DesignMatrix d = class_design(n_maj, n_min);
    RngStream stream(rng.next_u64());
    std::size_t want_maj = n_maj, want_min = n_min;
    ClassCounts got;
    std::string label;
    const auto kind = c % 3;
    if (kind == 0) {
      const std::size_t k = rng.uniform_index(1000);
      // (1 - k/1000) N rounded half up, at least 1, in integers.
      want_maj = std::max<std::size_t>(1, (2 * (1000 - k) * n_maj + 1000) / 2000);
      got = class_counts(d, undersample_random(d, static_cast<double>(k) / 1000.0, stream));
      label = fmt("under(%g) on %zu/%zu", static_cast<double>(k) / 1000.0, n_maj, n_min);
    } else if (kind == 1) {
      const int a = 1 + static_cast<int>(rng.uniform_index(30));
      const int b = 1 + static_cast<int>(rng.uniform_index(30));
      const std::size_t target =
          std::max<std::size_t>(1, (2 * n_maj * static_cast<std::size_t>(b) + static_cast<std::size_t>(a)) /
                                       (2 * static_cast<std::size_t>(a)));
      label = fmt("over(%d:%d) on %zu/%zu", a, b, n_maj, n_min);
      if (target < n_min) {
        try {
          oversample_random(d, a, b, stream);
          ++mismatches;
          if (first.empty()) first = label + " did not reject";
        } catch (const Error& e) {
          if (e.code() != Errc::RatioWouldShrinkMinority) ++mismatches;
        }
        ++rejected;
        continue;
      }
      want_min = target;
      got = class_counts(d, oversample_random(d, a, b, stream));
    } else {
      if (n_maj < n_min) continue;
      want_maj = n_min;
      got = class_counts(d, case_control(d, stream));
      label = fmt("cc on %zu/%zu", n_maj, n_min);
    }
    ++cases;
    if (got.majority != want_maj || got.minority != want_min) {
      ++mismatches;
      if (first.empty())
        first = fmt("%s: got %zu/%zu want %zu/%zu", label.c_str(), got.majority, got.minority, want_maj, want_min);
    }
  }
  return {cases >= 1000 && mismatches == 0,
          fmt("%zu valid cases + %zu rejected ratios, %zu mismatches%s%s", cases, rejected, mismatches,
              first.empty() ? "" : "; first: ", first.c_str())};
}

Outcome criterion5() {
  RngStream rng(505);
  std::size_t points = 0, violations = 0, designs = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 4 + rng.uniform_index(47);  // <= 50
    const std::size_t dim = 1 + rng.uniform_index(4);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(i), 0) = 1.0;
      for (std::size_t j = 1; j <= dim; ++j)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rng.uniform01() < 0.2 ? static_cast<double>(rng.uniform_index(3)) : 10.0 * rng.normal();
      y(static_cast<Eigen::Index>(i)) = (i < 2 || rng.uniform01() < 0.4) ? 1.0 : 0.0;
      if (y(static_cast<Eigen::Index>(i)) == 1.0) minority.push_back(i);
    }
    const DesignMatrix d = DesignMatrix::from_arrays(x, y);
    const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(6, minority.size() - 1));
    const int m = 1 + static_cast<int>(rng.uniform_index(3));
    RngStream stream(rng.next_u64());
    const ResampledSet set = smote(d, static_cast<int>(k), m, stream);
    ++designs;
    for (const auto& s : set.synthetic_rows) {
      ++points;
      bool ok = true;
      for (Eigen::Index j = 0; j < s.features.size(); ++j) {
        const double lo = std::min(s.parent(j), s.neighbour(j));
        const double hi = std::max(s.parent(j), s.neighbour(j));
        const double excess = std::max(lo - s.features(j), s.features(j) - hi);
        worst = std::max(worst, excess);
        if (excess > 1e-12) ok = false;
      }
      // Parent: some minority row. Neighbour: a different minority row within
      // the parent's k nearest (ties at the k-th distance accepted).
      bool pair_ok = false;
      for (std::size_t p : minority) {
        if (x.row(static_cast<Eigen::Index>(p)).transpose() != s.parent) continue;
        std::vector<double> dists;
        for (std::size_t q : minority)
          if (q != p) dists.push_back((x.row(static_cast<Eigen::Index>(q)) - x.row(static_cast<Eigen::Index>(p))).squaredNorm());
        std::sort(dists.begin(), dists.end());
        const double kth = dists[k - 1];
        for (std::size_t q : minority) {
          if (q == p || x.row(static_cast<Eigen::Index>(q)).transpose() != s.neighbour) continue;
          if ((x.row(static_cast<Eigen::Index>(q)) - x.row(static_cast<Eigen::Index>(p))).squaredNorm() <= kth)
            pair_ok = true;
        }
      }
      if (!ok || !pair_ok) ++violations;
    }
  }
  return {violations == 0 && points > 0,
          fmt("%zu designs, %zu synthetic points, %zu violations, max betweenness excess %.1e", designs, points,
              violations, worst)};
}

Outcome criterion6() {
  RngStream rng(606);
  double worst_intercept = 0.0, worst_fd = 0.0, worst_score_ratio = 0.0;
  std::size_t score_checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 5 + rng.uniform_index(100);
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n)), w(static_cast<Eigen::Index>(n));
    const double p = 0.02 + 0.9 * rng.uniform01();
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y(i) = i == 0 ? 1.0 : i == 1 ? 0.0 : (rng.uniform01() < p ? 1.0 : 0.0);
      w(i) = 0.1 + 3.0 * rng.uniform01();
    }
    const double mean = w.dot(y) / w.sum();
    const auto f = fit(DesignMatrix::from_arrays(x, y, w));
    worst_intercept = std::max(worst_intercept, std::abs(f.beta(0) - std::log(mean / (1.0 - mean))));
  }
  for (int rep = 0; rep < 200; ++rep) {
    const DesignMatrix d = random_design(rng, 40 + rng.uniform_index(400), 1 + rng.uniform_index(5), 0.6);
    FitControl control;
    try {
      const auto f = fit(d, control);
      if (!f.converged || f.separation_flag) continue;
      const double bound = 10.0 * control.tolerance * static_cast<double>(d.n_rows());
      worst_score_ratio = std::max(worst_score_ratio, score(f.beta, d).cwiseAbs().maxCoeff() / bound);
      ++score_checked;
    } catch (const Error&) {
    }
  }
  for (int rep = 0; rep < 50; ++rep) {
    DesignMatrix d = random_design(rng, 10 + rng.uniform_index(60), 1 + rng.uniform_index(4), 0.8);
    for (Eigen::Index i = 0; i < d.weights.size(); ++i) d.weights(i) = 0.2 + 2.0 * rng.uniform01();
    Eigen::VectorXd beta(d.rows.cols());
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = rng.normal();
    const Eigen::VectorXd g = score(beta, d);
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(beta(j)));
      Eigen::VectorXd up = beta, down = beta;
      up(j) += h;
      down(j) -= h;
      const double fd = (log_likelihood(up, d) - log_likelihood(down, d)) / (2.0 * h);
      worst_fd = std::max(worst_fd, std::abs(fd - g(j)) / std::max(1.0, std::abs(g(j))));
    }
  }
  return {worst_intercept <= 1e-10 && worst_score_ratio < 1.0 && score_checked >= 100 && worst_fd <= 1e-5,
          fmt("intercept max err %.1e; score/bound max %.2e over %zu converged fits; finite-difference rel err %.1e",
              worst_intercept, worst_score_ratio, score_checked, worst_fd)};
}

Panel fixture(std::uint64_t seed = 42) {
  SynthConfig cfg;
  cfg.seed = seed;
  return generate(cfg);
}

Recipe make_recipe(const std::string& spec, std::size_t K, std::uint64_t seed) {
  Recipe r;
  r.name = spec;
  r.spec = parse_spec(spec);
  r.K = K;
  r.seed = seed;
  return r;
}

Outcome criterion7() {
  const Panel clean = fixture();
  const TimeIndex t_inj = clean.horizon_boundaries()[25];
  // An individual off the roster at t_inj and a newcomer, both with covariates
  // far outside the data and the outcome they would "predict".
  std::set<std::string> present;
  for (std::size_t i : clean.indices_at(t_inj)) present.insert(clean[i].individual_id);
  std::string absent;
  for (const auto& id : clean.individuals())
    if (!present.count(id)) {
      absent = id;
      break;
    }
  std::vector<ObservationRecord> records = clean.records();
  std::vector<double> extreme(clean.schema().size(), 1e4);
  records.push_back({absent, t_inj, extreme, 1});
  records.push_back({"ZZ_canary", t_inj, std::vector<double>(clean.schema().size(), -1e4), 0});
  const Panel dirty(clean.schema(), records, clean.horizon_boundaries());

  std::size_t compared = 0, changed = 0;
  for (const char* spec : {"id", "under(0.3)", "smote(k=5,m=2)", "over(5:3)+tomek"}) {
    const Recipe r = make_recipe(spec, spec == std::string("id") ? 1 : 3, 17);
    const auto a = longitudinal_eval(clean, r);
    const auto b = longitudinal_eval(dirty, r);
    std::size_t j = 0;
    for (const auto& pa : a.pairs) {
      if (pa.time_index > t_inj) break;
      while (b.pairs[j].individual_id != pa.individual_id || b.pairs[j].time_index != pa.time_index) ++j;
      ++compared;
      if (std::memcmp(&pa.score, &b.pairs[j].score, sizeof(double)) != 0) ++changed;
    }
  }
  return {changed == 0 && compared > 0,
          fmt("4 recipes, %zu predictions at t <= %lld compared bitwise, %zu changed", compared,
              static_cast<long long>(t_inj), changed)};
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2).
double sign_test(std::size_t wins, std::size_t n) {
  double p = 0.0;
  for (std::size_t k = wins; k <= n; ++k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    p += c;
  }
  return p / std::pow(2.0, static_cast<double>(n));
}

struct Ordering {
  double mean_l = 0, mean_c = 0, mean_s = 0;
  std::size_t c_over_l = 0, l_over_s = 0;
  std::set<double> distinct;
};

Ordering ordering_over(const std::vector<std::pair<const Panel*, std::uint64_t>>& runs) {
  Ordering o;
  for (const auto& [panel, seed] : runs) {
    const Recipe r = make_recipe("id", 1, seed);
    const double l = longitudinal_eval(*panel, r).auc;
    const double c = loocv_eval(*panel, r).auc;
    const double s = split_eval(*panel, panel->horizon_boundaries().front(), r).auc;
    o.mean_l += l / static_cast<double>(runs.size());
    o.mean_c += c / static_cast<double>(runs.size());
    o.mean_s += s / static_cast<double>(runs.size());
    o.c_over_l += c > l;
    o.l_over_s += l > s;
    o.distinct.insert(l);
  }
  return o;
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const Panel panel = fixture();
  std::vector<std::pair<const Panel*, std::uint64_t>> runs;
  for (std::uint64_t r = 0; r < 10; ++r) runs.push_back({&panel, derive_seed(8, {r})});
  const Ordering o = ordering_over(runs);
  const double p1 = sign_test(o.c_over_l, 10), p2 = sign_test(o.l_over_s, 10);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = o.mean_c > o.mean_l && o.mean_l > o.mean_s && p1 < 0.05 && p2 < 0.05;
  std::string detail = fmt("seed-42 fixture, 10 repeat seeds: LOOCV %.4f > longitudinal %.4f > split %.4f; "
                           "sign tests %zu/10 (p=%.4f), %zu/10 (p=%.4f); %zu distinct longitudinal AUCs; %.0fs",
                           o.mean_c, o.mean_l, o.mean_s, o.c_over_l, p1, o.l_over_s, p2, o.distinct.size(), secs);

  // Not part of the verdict: the same comparison across ten fixture seeds.
  std::vector<Panel> panels;
  for (std::uint64_t s = 42; s < 52; ++s) panels.push_back(fixture(s));
  std::vector<std::pair<const Panel*, std::uint64_t>> across;
  for (const auto& p : panels) across.push_back({&p, derive_seed(8, {0})});
  const Ordering x = ordering_over(across);
  std::printf("info: fixture seeds 42..51: LOOCV %.4f, longitudinal %.4f, split %.4f; LOOCV > longitudinal %zu/10, "
              "longitudinal > split %zu/10\n",
              x.mean_c, x.mean_l, x.mean_s, x.c_over_l, x.l_over_s);
  return {pass && secs < 600.0, detail};
}

Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const Panel panel = fixture();
  std::vector<double> k1, k20;
  EvalOptions keep;
  keep.keep_replicate_scores = true;
  for (std::uint64_t s = 0; s < 15; ++s) {
    const std::uint64_t seed = derive_seed(9, {s});
    k1.push_back(longitudinal_eval(panel, make_recipe("under(0.3)", 1, seed)).auc);
    k20.push_back(longitudinal_eval(panel, make_recipe("under(0.3)", 20, seed)).auc);
  }
  const double sd1 = sample_std(k1), sd20 = sample_std(k20);
  const auto curve = aggregation_curve(longitudinal_eval(panel, make_recipe("under(0.3)", 60, derive_seed(9, {0})), keep));
  double worst = 0.0;
  for (const auto& pt : curve)
    if (pt.K >= 20) worst = std::max(worst, std::abs(pt.auc - curve.back().auc));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {sd20 < sd1 && worst < 0.01,
          fmt("std AUC over 15 seeds: K=1 %.4f, K=20 %.4f; max |AUC(K) - AUC(60)| for K >= 20: %.4f; %.0fs", sd1,
              sd20, worst, secs)};
}

Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  const Panel panel = fixture();
  const std::vector<std::string> grid = {"over(25:1)", "over(10:1)", "over(5:3)", "over(1:1)"};
  std::vector<SamplerSpec> specs = {parse_spec("id")};
  for (const auto& g : grid) specs.push_back(parse_spec(g));
  const SweepTable table = rate_sweep(panel, specs, 5, 10, 10);
  const double plain = table.rows[0].mean_auc;
  double best = -1.0;
  std::string best_spec, rows;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    rows += r.runs ? fmt(" %s %.4f", r.spec.c_str(), r.mean_auc) : fmt(" %s error", r.spec.c_str());
    if (r.runs && r.mean_auc > best) {
      best = r.mean_auc;
      best_spec = r.spec;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {best > plain, fmt("plain %.4f;%s; best %s, margin %+.4f; %.0fs", plain, rows.c_str(), best_spec.c_str(),
                            best - plain, secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion11() {
  const fs::path root = fs::temp_directory_path() / "rarepred_acceptance_11";
  fs::remove_all(root);
  const std::string text = R"json({
    "seed": 11,
    "input": {"synth": {"seed": 42}},
    "recipes": [{"name": "plain", "spec": "id"},
                {"name": "under", "spec": "under(0.3)", "K": 3},
                {"name": "smote", "spec": "smote(k=5,m=1)", "K": 2}],
    "protocols": ["longitudinal", "split"],
    "repeats": 2,
    "emit": ["report_json", "sweep_csv", "roc_csv", "aggregation_curve_csv"]
  })json";
  auto config = parse_experiment_config(text);
  config.outputs = (root / "a").string();
  const auto a = run(config);
  config.outputs = (root / "b").string();
  const auto b = run(config);
  std::size_t differing = a.artifacts.size() == b.artifacts.size() ? 0 : 1;
  for (std::size_t i = 0; i < std::min(a.artifacts.size(), b.artifacts.size()); ++i)
    if (a.artifacts[i].filename() != b.artifacts[i].filename() || slurp(a.artifacts[i]) != slurp(b.artifacts[i]))
      ++differing;
  auto ma = nlohmann::json::parse(slurp(a.manifest));
  auto mb = nlohmann::json::parse(slurp(b.manifest));
  ma.erase("wall_time_seconds");
  mb.erase("wall_time_seconds");
  const bool manifest_same = ma == mb;
  return {differing == 0 && manifest_same && !a.artifacts.empty() && a.exit_status == 0,
          fmt("%zu artifacts byte-compared, %zu differ; manifests equal apart from wall time: %s", a.artifacts.size(),
              differing, manifest_same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10, criterion11};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s\n", number, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
