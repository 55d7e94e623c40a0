#pragma once

#include <Eigen/Dense>

#include "clusbird/common.hpp"

namespace clusbird {

using Eigen::Index;

// Full parameter state of the mixture. Cluster k puts Bernoulli probability
// pi(mu_d + f_k . a_d) on y_nd = 1, where pi is the logistic function. The
// rows of f place the clusters in an L-dimensional subspace; a holds the
// per-variable loadings of that subspace.
struct ModelParams {
  Eigen::VectorXd xi;  // K mixing proportions, positive, summing to 1
  Eigen::VectorXd mu;  // D per-variable intercepts on the logit scale
  Eigen::MatrixXd f;   // K x L cluster scores, orthonormal columns
  Eigen::MatrixXd a;   // D x L loadings

  Index k() const { return xi.size(); }
  Index l() const { return f.cols(); }
  Index d() const { return mu.size(); }

  // Throws ValidationError unless: all entries finite, xi > 0 with
  // |sum(xi) - 1| <= 1e-12, f is K x L with L <= K and orthonormality
  // defect <= 1e-8, and a is D x L.
  void validate() const;
};

// L1 penalty weight shared by every loading column. The penalized objective
// subtracts N * lambda * sum |a_dl| from the log likelihood.
struct PenaltySpec {
  double lambda = 0.0;

  void validate() const;
};

// max_ij |M'M - I|, the measure used by every orthonormality check.
double orthonormality_defect(const Eigen::MatrixXd& m);

}  // namespace clusbird
