#include "clusbird/scores.hpp"

#include "clusbird/estep.hpp"

namespace clusbird {

double score_objective(const Dataset& data, const ModelParams& fitted,
                       const Eigen::MatrixXd& g) {
  if (g.rows() != data.n() || g.cols() != fitted.l())
    throw ValidationError("scores: g must be N x L");
  if (fitted.d() != data.d())
    throw ValidationError("scores: model dimension does not match data");
  const Eigen::MatrixXd theta =
      ((g * fitted.a.transpose()).rowwise() + fitted.mu.transpose()).eval();
  return (data.q.array() * theta.array())
      .unaryExpr([](double x) { return log_inverse_logit(x); })
      .sum();
}

Eigen::MatrixXd initial_scores(const Dataset& data,
                               const ModelParams& fitted) {
  fitted.validate();
  if (data.n() < fitted.l())
    throw ValidationError("scores: need at least L observations");
  const Responsibilities resp = responsibilities(data, fitted);
  const Eigen::MatrixXd uf = resp.u * fitted.f;
  try {
    return project_orthonormal(uf);
  } catch (const ValidationError&) {
    // Near-identical responsibility rows collapse u * f onto fewer than L
    // directions; QR still yields a deterministic orthonormal completion.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(uf);
    return qr.householderQ() *
           Eigen::MatrixXd::Identity(data.n(), fitted.l());
  }
}

Eigen::MatrixXd estimate_scores(const Dataset& data, const ModelParams& fitted,
                                const GpConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd start = initial_scores(data, fitted);
  if ((fitted.a.array() == 0.0).all()) return start;

  const auto objective = [&data, &fitted](const Eigen::MatrixXd& g) {
    return -score_objective(data, fitted, g);
  };
  const auto gradient = [&data, &fitted](const Eigen::MatrixXd& g) {
    const Eigen::MatrixXd theta =
        ((g * fitted.a.transpose()).rowwise() + fitted.mu.transpose()).eval();
    const Eigen::ArrayXXd pi_neg =
        (-(data.q.array() * theta.array()))
            .unaryExpr([](double x) { return inverse_logit(x); });
    return Eigen::MatrixXd(-(data.q.array() * pi_neg).matrix() * fitted.a);
  };
  return gp_minimize(objective, gradient, start, cfg);
}

}  // namespace clusbird
