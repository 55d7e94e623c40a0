#pragma once

#include <vector>

#include <Eigen/Dense>

#include "clusbird/estep.hpp"

namespace clusbird {

// A cluster whose expected size drops below this fraction of N is reported
// as empty. Its contribution is dropped only when the mass is exactly zero
// (the lone case where the weighted mean would be 0/0); positive mass keeps
// participating so the majorizer descent stays exact.
inline constexpr double kEmptyClusterFraction = 1e-8;

// Quadratic surrogate of the negative log likelihood, anchored at the
// parameters that produced z. Minimizing
//   (1/8) sum_nk u_nk ||z_nk - mu - a f_k||^2 + N * lambda * ||a||_1
// block-by-block is the whole M-step.
struct MajorizationState {
  std::vector<Eigen::MatrixXd> z;  // per cluster: N x D working responses
  Eigen::MatrixXd zbar;            // K x D responsibility-weighted means of z
  Eigen::MatrixXd zbar_star;       // K x D weighted means of z - mu
  Eigen::MatrixXd v;               // D x L linear coefficients
  Eigen::MatrixXd w;               // L x L quadratic coefficients
  Eigen::VectorXd nk;              // expected cluster sizes (zeros kept as 0)
  bool empty_cluster = false;
  bool has_means = false;
  bool has_centered = false;
  bool has_quad = false;
};

// xi_k = N_k / N for k < K, last component takes the remainder. Exactly-empty
// clusters are floored at a vanishing positive mass so downstream log-space
// arithmetic stays finite.
Eigen::VectorXd update_mixing(const Responsibilities& resp);

// z_nkd = theta_kd + 4 q_nd (1 - pi(q_nd theta_kd)); fills only the z part.
MajorizationState working_responses(const Dataset& data, const ModelParams& p);

// Fills zbar (and nk); flags clusters below the mass guard.
void weighted_means(MajorizationState& st, const Responsibilities& resp);

// Exact minimizer of the surrogate over mu with everything else fixed:
// mu = N^{-1} sum_k N_k (zbar_k - a f_k). Uses the incoming params' f and a.
Eigen::VectorXd update_mu(const MajorizationState& st,
                          const Responsibilities& resp, const ModelParams& p);

// zbar_star = zbar - mu (per active cluster); call after updating mu.
void centered_means(MajorizationState& st, const Eigen::VectorXd& mu);

// v_dl = sum_k N_k zbar_star_kd f_kl and w_ll' = sum_k N_k f_kl f_kl',
// using the params' current f (call after any f update this sweep).
void quad_coefficients(MajorizationState& st, const Responsibilities& resp,
                       const ModelParams& p);

// Exact minimizer of the one-coordinate subproblem
//   (1/8) w_ll t^2 - (1/4) c t + N lambda |t|:
// soft thresholding at 4 N lambda, scaled by 1 / w_ll.
double soft_threshold_update(double c, double wll, Index n, double lambda);

// Cyclic coordinate descent over (d, l) with c_dl = v_dl - sum_{l'!=l}
// w_ll' a_dl'; sweeps until the largest coordinate change is <= tol or the
// sweep cap is hit. Requires w_ll > 0 on every column.
Eigen::MatrixXd update_loadings(const Eigen::MatrixXd& v,
                                const Eigen::MatrixXd& w, Eigen::MatrixXd a,
                                const PenaltySpec& spec, Index n,
                                int max_sweeps = 100, double tol = 1e-8);

// One full surrogate descent in mu then a (xi and f untouched), anchored at
// the incoming params. Never increases the surrogate.
ModelParams mstep_sweep(const Dataset& data, const ModelParams& p,
                        const Responsibilities& resp, const PenaltySpec& spec);

// Evaluates the surrogate at (mu, f, a) given the anchored z and the full
// responsibility weights; the quantity mstep descent is measured against.
double majorizer_value(const MajorizationState& st,
                       const Responsibilities& resp, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& f, const Eigen::MatrixXd& a,
                       const PenaltySpec& spec);

}  // namespace clusbird
