#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clusbird/dataset.hpp"
#include "clusbird/params.hpp"

namespace clusbird {

// Logistic function 1 / (1 + exp(-t)), overflow-free for |t| up to 700.
double inverse_logit(double t);

// log pi(t), stable in both tails (never takes log of an underflowed pi).
double log_inverse_logit(double t);

// K x D matrix of theta_kd = mu_d + f_k . a_d.
Eigen::MatrixXd canonical_theta(const ModelParams& p);

// Per-row log p_k(y_n) = sum_d log pi(q_nd * theta_kd) for one cluster.
Eigen::VectorXd log_component_prob(const Dataset& data,
                                   const Eigen::VectorXd& theta_k);

// N x K matrix with column k = log_component_prob for cluster k.
Eigen::MatrixXd log_component_matrix(const Dataset& data,
                                     const ModelParams& p);

// Observed-data log likelihood, computed via per-row logsumexp.
double log_likelihood(const Dataset& data, const ModelParams& p);

// lambda * sum_dl |a_dl|.
double penalty_value(const Eigen::MatrixXd& a, const PenaltySpec& spec);

// log likelihood minus N times the penalty; the quantity every fit ascends.
double penalized_objective(const Dataset& data, const ModelParams& p,
                           const PenaltySpec& spec);

// Exact zeros only; thresholding is the estimator's job, not the counter's.
long count_nonzeros(const Eigen::MatrixXd& a);

// K + D + K*L + (number of nonzero loadings).
long degrees_of_freedom(const ModelParams& p);

double bic_from(double loglik, Index n, long df);

// -2 * loglik + log(N) * df. N = 1 is accepted (log 1 = 0) but callers
// should treat single-row BICs as meaningless.
double bic(const Dataset& data, const ModelParams& p);

// Outcome of one fit (or the winner of a multistart).
struct FitReport {
  ModelParams params;
  double lambda = 0.0;     // penalty weight the fit ran with
  double loglik = 0.0;
  double penalized = 0.0;  // loglik - N * penalty
  long df = 0;
  double bic = 0.0;
  std::vector<double> trace;         // penalized objective, initial value first
  std::vector<int> hard_labels;      // 1-based argmax responsibilities
  Eigen::MatrixXd responsibilities;  // N x K at the returned params
  int iterations = 0;
  bool converged = false;
  bool empty_cluster = false;  // some cluster fell below the mass guard
  int best_start = 0;          // multistart index of the winner
};

struct LoadedModel {
  ModelParams params;
  double lambda = 0.0;
  double loglik = 0.0;
  double bic = 0.0;
};

// JSON document with fields format_version, K, L, D, xi, mu, F, A (matrices
// as arrays of rows), lambda, loglik, bic. Loading re-validates every
// ModelParams invariant.
std::string model_to_json(const ModelParams& p, double lambda, double loglik,
                          double bic_value);
LoadedModel model_from_json(const std::string& text);
void save_model(const std::string& path, const ModelParams& p, double lambda,
                double loglik, double bic_value);
LoadedModel load_model(const std::string& path);

}  // namespace clusbird
