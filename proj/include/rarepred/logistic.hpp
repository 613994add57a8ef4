#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rarepred/design.hpp"

namespace rarepred {

struct FitControl {
  int max_iterations = 100;
  // Relative deviance change |D_old - D_new| / (|D_new| + 0.1).
  double tolerance = 1e-10;
  double divergence_bound = 1e4;
  // Relative pivot threshold of the equilibrated information factorization.
  double pivot_tolerance = 1e-12;
  // Fitted probabilities are clamped to [clamp, 1 - clamp] inside the deviance.
  double probability_clamp = 1e-12;
  // Linear predictors beyond this magnitude on positive-weight rows mean the
  // fit has pushed probabilities to numerical 0/1 (quasi-separation).
  double saturation_eta = 20.0;
  std::optional<Eigen::VectorXd> start;
};

struct FittedLogistic {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;  // NaN-filled when the final information is singular
  bool converged = false;
  int iterations = 0;
  double final_deviance = 0.0;
  bool separation_flag = false;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;
};

// 1 / (1 + exp(-eta)), saturating inside the open interval (0, 1).
double sigmoid(double eta) noexcept;

double predict_probability(const Eigen::Ref<const Eigen::VectorXd>& beta,
                           const Eigen::Ref<const Eigen::VectorXd>& x);

// Weighted log-likelihood sum_i w_i [y_i ln(pi_i) + (1 - y_i) ln(1 - pi_i)],
// evaluated without clamping.
double log_likelihood(const Eigen::VectorXd& beta, const DesignMatrix& design);

// Weighted score vector sum_i w_i (y_i - pi_i) x_i.
Eigen::VectorXd score(const Eigen::VectorXd& beta, const DesignMatrix& design);

// Weighted Fisher information sum_i w_i pi_i (1 - pi_i) x_i x_i'.
Eigen::MatrixXd information(const Eigen::VectorXd& beta, const DesignMatrix& design);

// Inverse of the weighted information at beta. Throws SingularInformation.
Eigen::MatrixXd variance(const Eigen::VectorXd& beta, const DesignMatrix& design,
                         double pivot_tolerance = 1e-12);

// Weighted maximum likelihood by iteratively reweighted least squares.
FittedLogistic fit(const DesignMatrix& design, const FitControl& control = {});

}  // namespace rarepred
