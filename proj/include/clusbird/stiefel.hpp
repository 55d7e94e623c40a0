#pragma once

#include <functional>

#include <Eigen/Dense>

#include "clusbird/mstep.hpp"

namespace clusbird {

// Gradient projection with step halving on the orthonormal-columns manifold.
struct GpConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  int max_iters = 200;
  double grad_tol = 1e-9;  // relative objective-decrease stopping threshold

  void validate() const;
};

// Nearest matrix with orthonormal columns (polar factor via thin SVD).
// Throws ValidationError when the input is rank deficient
// (smallest singular value < 1e-12 * largest).
Eigen::MatrixXd project_orthonormal(const Eigen::MatrixXd& m);

bool has_orthonormal_columns(const Eigen::MatrixXd& m, double tol = 1e-8);

using MatrixObjective = std::function<double(const Eigen::MatrixXd&)>;
using MatrixGradient = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

// Minimizes objective over matrices with orthonormal columns starting from
// an orthonormal start: candidate = project(X - alpha * grad), halving alpha
// until the objective strictly decreases. Stops when no step length helps,
// when the relative decrease falls below grad_tol, or at max_iters. The
// output is orthonormal and never has a larger objective than the start.
Eigen::MatrixXd gp_minimize(const MatrixObjective& objective,
                            const MatrixGradient& gradient,
                            const Eigen::MatrixXd& start,
                            const GpConfig& cfg = {});

// Surrogate gradient over the cluster scores:
//   (1/4) diag(N_k) (f a' - zbar_star) a,
// valid for any candidate f with the state's anchored z and centered means.
Eigen::MatrixXd f_gradient_at(const MajorizationState& st,
                              const Eigen::MatrixXd& f,
                              const Eigen::MatrixXd& a);
Eigen::MatrixXd f_gradient(const MajorizationState& st, const ModelParams& p);

// Flips columns of f (and the paired columns of a, keeping every theta_kd
// bit-identical) so each f column's largest-magnitude entry is positive.
void sign_canonicalize(Eigen::MatrixXd& f, Eigen::MatrixXd& a);

}  // namespace clusbird
