#include "clusbird/mstep.hpp"

#include <cmath>
#include <string>

namespace clusbird {

Eigen::VectorXd update_mixing(const Responsibilities& resp) {
  const Index k = resp.nk.size();
  const double n = resp.u.rows();
  if (k < 1 || n < 1.0) throw ValidationError("mixing: empty responsibilities");
  Eigen::VectorXd xi(k);
  double head = 0.0;
  for (Index j = 0; j + 1 < k; ++j) {
    xi(j) = resp.nk(j) / n;
    head += xi(j);
  }
  xi(k - 1) = 1.0 - head;
  if ((xi.array() <= 0.0).any()) {
    // Exactly-empty clusters would make log(xi) blow up downstream; nudge
    // them to a vanishing floor and renormalize. Only reachable when some
    // N_k is zero to machine precision.
    xi = xi.cwiseMax(1e-16);
    xi /= xi.sum();
  }
  return xi;
}

MajorizationState working_responses(const Dataset& data,
                                    const ModelParams& p) {
  const Eigen::MatrixXd theta = canonical_theta(p);
  MajorizationState st;
  st.z.reserve(static_cast<std::size_t>(p.k()));
  for (Index k = 0; k < p.k(); ++k) {
    Eigen::MatrixXd qt =
        (data.q.array().rowwise() * theta.row(k).array()).matrix();
    Eigen::MatrixXd zk(data.n(), data.d());
    for (Index i = 0; i < data.n(); ++i)
      for (Index j = 0; j < data.d(); ++j)
        zk(i, j) =
            theta(k, j) + 4.0 * data.q(i, j) * (1.0 - inverse_logit(qt(i, j)));
    st.z.push_back(std::move(zk));
  }
  return st;
}

void weighted_means(MajorizationState& st, const Responsibilities& resp) {
  const Index k = static_cast<Index>(st.z.size());
  if (resp.u.cols() != k)
    throw ValidationError("weighted_means: responsibility shape mismatch");
  const Index d = st.z.empty() ? 0 : st.z.front().cols();
  const double n = resp.u.rows();
  st.nk = resp.nk;
  st.zbar.setZero(k, d);
  st.empty_cluster = false;
  for (Index j = 0; j < k; ++j) {
    if (st.nk(j) < kEmptyClusterFraction * n) st.empty_cluster = true;
    if (st.nk(j) == 0.0) continue;  // 0/0 mean; the cluster carries no mass
    st.zbar.row(j) = (resp.u.col(j).transpose() * st.z[static_cast<std::size_t>(
                                                      j)]) /
                     st.nk(j);
  }
  st.has_means = true;
}

Eigen::VectorXd update_mu(const MajorizationState& st,
                          const Responsibilities& resp, const ModelParams& p) {
  if (!st.has_means) throw ValidationError("update_mu: means not computed");
  const double n = resp.u.rows();
  const Eigen::MatrixXd fa = p.f * p.a.transpose();  // K x D cluster offsets
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(st.zbar.cols());
  for (Index k = 0; k < st.zbar.rows(); ++k) {
    if (st.nk(k) == 0.0) continue;
    mu += st.nk(k) * (st.zbar.row(k) - fa.row(k)).transpose();
  }
  return mu / n;
}

void centered_means(MajorizationState& st, const Eigen::VectorXd& mu) {
  if (!st.has_means)
    throw ValidationError("centered_means: means not computed");
  st.zbar_star = st.zbar;
  for (Index k = 0; k < st.zbar.rows(); ++k) {
    if (st.nk(k) == 0.0) continue;
    st.zbar_star.row(k) -= mu.transpose();
  }
  st.has_centered = true;
}

void quad_coefficients(MajorizationState& st, const Responsibilities& resp,
                       const ModelParams& p) {
  if (!st.has_centered)
    throw ValidationError("quad_coefficients: centered means not computed");
  (void)resp;
  const Eigen::MatrixXd weighted_f =
      st.nk.asDiagonal() * p.f;  // rows of empty clusters are zero already
  st.v = st.zbar_star.transpose() * weighted_f;
  st.w = p.f.transpose() * weighted_f;
  st.has_quad = true;
}

double soft_threshold_update(double c, double wll, Index n, double lambda) {
  if (!(wll > 0.0))
    throw ValidationError("soft threshold: need positive curvature");
  const double threshold = 4.0 * static_cast<double>(n) * lambda;
  const double mag = std::abs(c) - threshold;
  if (mag <= 0.0) return 0.0;
  return (c > 0.0 ? mag : -mag) / wll;
}

Eigen::MatrixXd update_loadings(const Eigen::MatrixXd& v,
                                const Eigen::MatrixXd& w, Eigen::MatrixXd a,
                                const PenaltySpec& spec, Index n,
                                int max_sweeps, double tol) {
  spec.validate();
  if (v.rows() != a.rows() || v.cols() != a.cols())
    throw ValidationError("loadings: v and a shapes differ");
  if (w.rows() != a.cols() || w.cols() != a.cols())
    throw ValidationError("loadings: w must be L x L");
  for (Index l = 0; l < w.cols(); ++l)
    if (!(w(l, l) > 0.0))
      throw ValidationError(
          "loadings: zero curvature on column " + std::to_string(l + 1) +
          " (all mass in empty clusters?)");
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index d = 0; d < a.rows(); ++d) {
      for (Index l = 0; l < a.cols(); ++l) {
        double c = v(d, l);
        for (Index l2 = 0; l2 < a.cols(); ++l2)
          if (l2 != l) c -= w(l, l2) * a(d, l2);
        const double updated = soft_threshold_update(c, w(l, l), n, spec.lambda);
        max_change = std::max(max_change, std::abs(updated - a(d, l)));
        a(d, l) = updated;
      }
    }
    if (max_change <= tol) break;
  }
  return a;
}

ModelParams mstep_sweep(const Dataset& data, const ModelParams& p,
                        const Responsibilities& resp, const PenaltySpec& spec) {
  MajorizationState st = working_responses(data, p);
  weighted_means(st, resp);
  ModelParams next = p;
  next.xi = update_mixing(resp);
  next.mu = update_mu(st, resp, p);
  centered_means(st, next.mu);
  quad_coefficients(st, resp, next);
  next.a = update_loadings(st.v, st.w, p.a, spec, data.n());
  return next;
}

double majorizer_value(const MajorizationState& st,
                       const Responsibilities& resp, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& f, const Eigen::MatrixXd& a,
                       const PenaltySpec& spec) {
  const Index k = static_cast<Index>(st.z.size());
  const double n = resp.u.rows();
  const Eigen::MatrixXd fa = f * a.transpose();  // K x D
  double quad = 0.0;
  for (Index j = 0; j < k; ++j) {
    const Eigen::RowVectorXd center = mu.transpose() + fa.row(j);
    const Eigen::MatrixXd& zj = st.z[static_cast<std::size_t>(j)];
    quad += (resp.u.col(j).array() *
             (zj.rowwise() - center).rowwise().squaredNorm().array())
                .sum();
  }
  return 0.125 * quad + n * penalty_value(a, spec);
}

}  // namespace clusbird
