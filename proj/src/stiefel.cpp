#include "clusbird/stiefel.hpp"

#include <cmath>

namespace clusbird {

void GpConfig::validate() const {
  if (!(initial_step > 0.0) || !std::isfinite(initial_step))
    throw ValidationError("gp: initial_step must be positive");
  if (!(shrink > 0.0) || !(shrink < 1.0))
    throw ValidationError("gp: shrink must lie in (0, 1)");
  if (max_iters < 0) throw ValidationError("gp: max_iters must be >= 0");
  if (!(grad_tol >= 0.0)) throw ValidationError("gp: grad_tol must be >= 0");
}

Eigen::MatrixXd project_orthonormal(const Eigen::MatrixXd& m) {
  if (m.rows() < m.cols())
    throw ValidationError("project: need at least as many rows as columns");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-12 * sv(0))
    throw ValidationError("project: rank-deficient input");
  return svd.matrixU() * svd.matrixV().transpose();
}

bool has_orthonormal_columns(const Eigen::MatrixXd& m, double tol) {
  return m.rows() >= m.cols() && orthonormality_defect(m) <= tol;
}

Eigen::MatrixXd gp_minimize(const MatrixObjective& objective,
                            const MatrixGradient& gradient,
                            const Eigen::MatrixXd& start, const GpConfig& cfg) {
  cfg.validate();
  if (!has_orthonormal_columns(start))
    throw ValidationError("gp: start must have orthonormal columns");
  Eigen::MatrixXd x = start;
  double value = objective(x);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::MatrixXd grad = gradient(x);
    double alpha = cfg.initial_step;
    bool moved = false;
    Eigen::MatrixXd candidate;
    double candidate_value = value;
    // Halve until the projected step strictly decreases the objective; a
    // projection failure (rank-deficient X - alpha G) just shrinks further.
    for (int halving = 0; halving < 60; ++halving) {
      bool projected = true;
      try {
        candidate = project_orthonormal(x - alpha * grad);
      } catch (const ValidationError&) {
        projected = false;
      }
      if (projected) {
        candidate_value = objective(candidate);
        if (candidate_value < value) {
          moved = true;
          break;
        }
      }
      alpha *= cfg.shrink;
    }
    if (!moved) break;
    const double decrease = value - candidate_value;
    x = candidate;
    value = candidate_value;
    if (decrease <= cfg.grad_tol * (1.0 + std::abs(value))) break;
  }
  return x;
}

Eigen::MatrixXd f_gradient_at(const MajorizationState& st,
                              const Eigen::MatrixXd& f,
                              const Eigen::MatrixXd& a) {
  if (!st.has_centered)
    throw ValidationError("f gradient: centered means not computed");
  return 0.25 * (st.nk.asDiagonal() * (f * a.transpose() - st.zbar_star)) * a;
}

Eigen::MatrixXd f_gradient(const MajorizationState& st, const ModelParams& p) {
  return f_gradient_at(st, p.f, p.a);
}

void sign_canonicalize(Eigen::MatrixXd& f, Eigen::MatrixXd& a) {
  if (f.cols() != a.cols())
    throw ValidationError("canonicalize: f and a column counts differ");
  for (Index l = 0; l < f.cols(); ++l) {
    Index argmax = 0;
    f.col(l).cwiseAbs().maxCoeff(&argmax);
    if (f(argmax, l) < 0.0) {
      f.col(l) = -f.col(l);
      a.col(l) = -a.col(l);
    }
  }
}

}  // namespace clusbird
