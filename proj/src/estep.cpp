#include "clusbird/estep.hpp"

namespace clusbird {

Eigen::MatrixXd normalized_exp_rows(const Eigen::MatrixXd& logw) {
  Eigen::MatrixXd u(logw.rows(), logw.cols());
  for (Index i = 0; i < logw.rows(); ++i) {
    const double m = logw.row(i).maxCoeff();
    Eigen::ArrayXd e = (logw.row(i).array() - m).exp();
    u.row(i) = (e / e.sum()).matrix();
  }
  return u;
}

Responsibilities responsibilities(const Dataset& data, const ModelParams& p) {
  p.validate();
  Eigen::MatrixXd logw = log_component_matrix(data, p);
  logw.rowwise() += p.xi.array().log().matrix().transpose();
  Responsibilities out;
  out.u = normalized_exp_rows(logw);
  out.nk = out.u.colwise().sum().transpose();
  return out;
}

}  // namespace clusbird
