#pragma once

#include <Eigen/Dense>

#include "clusbird/dataset.hpp"
#include "clusbird/model.hpp"

namespace clusbird {

struct Responsibilities {
  Eigen::MatrixXd u;   // N x K posterior cluster probabilities, rows sum to 1
  Eigen::VectorXd nk;  // column sums (expected cluster sizes)
};

// Row-wise softmax of a matrix of log weights: subtracts each row's max
// before exponentiating, then normalizes. Adding a per-row constant to the
// input leaves the output unchanged.
Eigen::MatrixXd normalized_exp_rows(const Eigen::MatrixXd& logw);

// u_nk proportional to xi_k * p_k(y_n), computed entirely in log space so
// rows stay normalized for |theta| in the hundreds and D in the thousands.
Responsibilities responsibilities(const Dataset& data, const ModelParams& p);

}  // namespace clusbird
