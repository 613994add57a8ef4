#include "rarepred/logistic.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rarepred/error.hpp"

namespace rarepred {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();
const double kAlmostOne = std::nextafter(1.0, 0.0);

// log(1 + exp(z)) without overflow.
double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_columns(const Eigen::VectorXd& beta, const DesignMatrix& design) {
  if (beta.size() != design.rows.cols())
    throw Error(Errc::DimensionMismatch, "beta has " + std::to_string(beta.size()) + " entries, design has " +
                                             std::to_string(design.rows.cols()) + " columns");
}

// Nonzero entries of each row, kept when the design is mostly zeros (as with
// a block of individual dummies).
struct RowSparse {
  std::vector<std::size_t> start;
  std::vector<Eigen::Index> col;
  std::vector<double> val;
};

std::optional<RowSparse> row_sparse(const Eigen::MatrixXd& x) {
  const Eigen::Index nnz = (x.array() != 0.0).count();
  if (static_cast<double>(nnz) > 0.4 * static_cast<double>(x.size())) return std::nullopt;
  RowSparse s;
  s.start.reserve(static_cast<std::size_t>(x.rows()) + 1);
  s.col.reserve(static_cast<std::size_t>(nnz));
  s.val.reserve(static_cast<std::size_t>(nnz));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    s.start.push_back(s.col.size());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (x(i, j) != 0.0) {
        s.col.push_back(j);
        s.val.push_back(x(i, j));
      }
    }
  }
  s.start.push_back(s.col.size());
  return s;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& v,
                              const std::optional<RowSparse>& sparse) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  if (sparse) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double vi = v(i);
      if (vi == 0.0) continue;
      const std::size_t lo = sparse->start[static_cast<std::size_t>(i)];
      const std::size_t hi = sparse->start[static_cast<std::size_t>(i) + 1];
      for (std::size_t a = lo; a < hi; ++a) {
        const double va = vi * sparse->val[a];
        for (std::size_t b = lo; b <= a; ++b) gram(sparse->col[a], sparse->col[b]) += va * sparse->val[b];
      }
    }
    // Columns are visited in increasing order, so only the lower triangle is set.
    return gram.selfadjointView<Eigen::Lower>();
  }
  const Eigen::MatrixXd scaled = x.array().colwise() * v.array().sqrt();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  return gram.selfadjointView<Eigen::Lower>();
}

// Symmetric factorization of an equilibrated copy of `info`. Empty when a
// relative pivot falls below `tol` (or a diagonal entry is not positive).
struct InfoSolver {
  Eigen::VectorXd inv_sqrt_diag;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  bool ok = false;

  InfoSolver(const Eigen::MatrixXd& info, double tol) {
    const Eigen::VectorXd diag = info.diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) return;
    inv_sqrt_diag = diag.array().rsqrt();
    const Eigen::MatrixXd scaled = inv_sqrt_diag.asDiagonal() * info * inv_sqrt_diag.asDiagonal();
    ldlt.compute(scaled);
    if (ldlt.info() != Eigen::Success) return;
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    if (!(d.minCoeff() > tol * d.maxCoeff())) return;
    ok = true;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    return inv_sqrt_diag.asDiagonal() * ldlt.solve(inv_sqrt_diag.asDiagonal() * rhs);
  }

  Eigen::MatrixXd inverse() const {
    const auto p = inv_sqrt_diag.size();
    Eigen::MatrixXd inv = inv_sqrt_diag.asDiagonal() *
                          ldlt.solve(Eigen::MatrixXd::Identity(p, p)) * inv_sqrt_diag.asDiagonal();
    return 0.5 * (inv + inv.transpose());
  }
};

double clamped_deviance(const Eigen::VectorXd& eta, const DesignMatrix& d, double clamp) {
  const double log_lo = std::log(clamp);
  const double log_hi = std::log1p(-clamp);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double w = d.weights(i);
    if (w == 0.0) continue;
    // ln(pi) and ln(1 - pi) with pi clamped to [clamp, 1 - clamp].
    const double log_p = std::min(std::max(-softplus(-eta(i)), log_lo), log_hi);
    const double log_q = std::min(std::max(-softplus(eta(i)), log_lo), log_hi);
    dev -= 2.0 * w * (d.response(i) * log_p + (1.0 - d.response(i)) * log_q);
  }
  return dev;
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& eta) { return eta.unaryExpr([](double e) { return sigmoid(e); }); }

}  // namespace

double sigmoid(double eta) noexcept {
  double p;
  if (eta >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-eta));
  } else {
    const double e = std::exp(eta);
    p = e / (1.0 + e);
  }
  if (p < kTiny) return kTiny;
  if (p > kAlmostOne) return kAlmostOne;
  return p;
}

double predict_probability(const Eigen::Ref<const Eigen::VectorXd>& beta,
                           const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (beta.size() != x.size())
    throw Error(Errc::DimensionMismatch, "beta has " + std::to_string(beta.size()) + " entries, x has " +
                                             std::to_string(x.size()));
  return sigmoid(beta.dot(x));
}

double FittedLogistic::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return predict_probability(beta, x);
}

Eigen::VectorXd FittedLogistic::predict(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != beta.size())
    throw Error(Errc::DimensionMismatch, "rows have " + std::to_string(rows.cols()) + " columns, beta has " +
                                             std::to_string(beta.size()) + " entries");
  return probabilities(rows * beta);
}

double log_likelihood(const Eigen::VectorXd& beta, const DesignMatrix& design) {
  check_columns(beta, design);
  const Eigen::VectorXd eta = design.rows * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double y = design.response(i);
    ll -= design.weights(i) * (y * softplus(-eta(i)) + (1.0 - y) * softplus(eta(i)));
  }
  return ll;
}

Eigen::VectorXd score(const Eigen::VectorXd& beta, const DesignMatrix& design) {
  check_columns(beta, design);
  const Eigen::VectorXd pi = probabilities(design.rows * beta);
  const Eigen::VectorXd r = design.weights.cwiseProduct(design.response - pi);
  return design.rows.transpose() * r;
}

Eigen::MatrixXd information(const Eigen::VectorXd& beta, const DesignMatrix& design) {
  check_columns(beta, design);
  const Eigen::VectorXd pi = probabilities(design.rows * beta);
  const Eigen::VectorXd v = design.weights.array() * pi.array() * (1.0 - pi.array());
  return weighted_gram(design.rows, v, row_sparse(design.rows));
}

Eigen::MatrixXd variance(const Eigen::VectorXd& beta, const DesignMatrix& design, double pivot_tolerance) {
  InfoSolver solver(information(beta, design), pivot_tolerance);
  if (!solver.ok) throw Error(Errc::SingularInformation, "information matrix is singular at beta");
  return solver.inverse();
}

FittedLogistic fit(const DesignMatrix& design, const FitControl& control) {
  const auto& x = design.rows;
  const auto& y = design.response;
  const auto& w = design.weights;
  const Eigen::Index p = x.cols();
  if (x.rows() != y.size() || x.rows() != w.size())
    throw Error(Errc::DimensionMismatch, "design rows, response and weights disagree");
  if ((w.array() < 0.0).any()) throw Error(Errc::OutOfRange, "negative weight");

  const double w_events = w.dot(y);
  const double w_total = w.sum();
  if (!(w_events > 0.0) || !(w_total - w_events > 0.0))
    throw Error(Errc::AllOneClass, "fit needs positive weight in both classes");

  FittedLogistic out;
  Eigen::VectorXd beta;
  if (control.start) {
    beta = *control.start;
    if (beta.size() != p) throw Error(Errc::DimensionMismatch, "start vector has wrong length");
  } else {
    // Intercept at the logit of the weighted event rate, slopes at zero; the
    // first column is the intercept by construction.
    beta = Eigen::VectorXd::Zero(p);
    const double mean = w_events / w_total;
    beta(0) = std::log(mean / (1.0 - mean));
  }

  const std::optional<RowSparse> sparse = row_sparse(x);
  Eigen::VectorXd eta = x * beta;
  double dev = clamped_deviance(eta, design, control.probability_clamp);

  for (int it = 1; it <= control.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::VectorXd pi = probabilities(eta);
    const Eigen::VectorXd v = w.array() * pi.array() * (1.0 - pi.array());
    const Eigen::VectorXd grad = x.transpose() * w.cwiseProduct(y - pi);
    InfoSolver solver(weighted_gram(x, v, sparse), control.pivot_tolerance);
    if (!solver.ok) {
      // Singular at the starting point means collinear columns (or too few
      // effective rows); later on it can only come from saturated probabilities.
      if (it == 1 && !control.start) throw Error(Errc::SingularInformation, "information matrix is singular");
      if (it == 1) {
        // The supplied start is in a saturated region; begin from the default.
        FitControl fresh = control;
        fresh.start.reset();
        return fit(design, fresh);
      }
      out.separation_flag = true;
      break;
    }
    Eigen::VectorXd step = solver.solve(grad);

    Eigen::VectorXd candidate = beta + step;
    Eigen::VectorXd cand_eta = x * candidate;
    double cand_dev = clamped_deviance(cand_eta, design, control.probability_clamp);
    for (int halvings = 0; !(cand_dev <= dev * (1.0 + 1e-12) + 1e-12) && halvings < 40; ++halvings) {
      step *= 0.5;
      candidate = beta + step;
      cand_eta = x * candidate;
      cand_dev = clamped_deviance(cand_eta, design, control.probability_clamp);
    }

    const double change = std::abs(dev - cand_dev) / (std::abs(cand_dev) + 0.1);
    beta = std::move(candidate);
    eta = std::move(cand_eta);
    dev = cand_dev;

    if (beta.cwiseAbs().maxCoeff() > control.divergence_bound) {
      out.separation_flag = true;
      break;
    }
    if (change < control.tolerance) {
      out.converged = true;
      break;
    }
  }

  if (!out.converged && !out.separation_flag)
    throw Error(Errc::NoConvergence, "no convergence after " + std::to_string(out.iterations) + " iterations");

  if (out.converged) {
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      if (w(i) > 0.0 && std::abs(eta(i)) > control.saturation_eta) {
        out.separation_flag = true;
        break;
      }
    }
  }

  out.beta = beta;
  out.final_deviance = dev;
  InfoSolver final_solver(information(beta, design), control.pivot_tolerance);
  out.covariance = final_solver.ok ? final_solver.inverse()
                                   : Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace rarepred
