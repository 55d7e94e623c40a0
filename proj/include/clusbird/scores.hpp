#pragma once

#include <Eigen/Dense>

#include "clusbird/model.hpp"
#include "clusbird/stiefel.hpp"

namespace clusbird {

// Post-hoc objective for object scores g_n under a fitted model:
//   S(G) = sum_nd log pi(q_nd (mu_d + g_n . a_d)),  G'G = I.
double score_objective(const Dataset& data, const ModelParams& fitted,
                       const Eigen::MatrixXd& g);

// Projection of the responsibility-weighted cluster scores u * f onto the
// orthonormal manifold; falls back to a deterministic QR completion when
// that matrix is rank deficient. Requires N >= L.
Eigen::MatrixXd initial_scores(const Dataset& data, const ModelParams& fitted);

// Maximizes S(G) by gradient projection from initial_scores. The gradient of
// -S is the (1/4)-scaled residual-times-loading form
//   (1/4) (g a' - (z - mu)) a = -(q (1 - pi(q theta))) a
// anchored at the current iterate. With a = 0 the objective is constant and
// the initializer is returned unchanged.
Eigen::MatrixXd estimate_scores(const Dataset& data, const ModelParams& fitted,
                                const GpConfig& cfg = {});

}  // namespace clusbird
