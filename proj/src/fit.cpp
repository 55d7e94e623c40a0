#include "clusbird/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace clusbird {

void FitConfig::validate() const {
  if (k < 1) throw ValidationError("fit: need k >= 1");
  if (l < 1 || l > k) throw ValidationError("fit: need 1 <= l <= k");
  penalty.validate();
  if (max_outer_iters < 1) throw ValidationError("fit: need max_outer_iters >= 1");
  if (!(outer_tol >= 0.0)) throw ValidationError("fit: outer_tol must be >= 0");
  if (n_starts < 1) throw ValidationError("fit: need n_starts >= 1");
  if (threads < 1) throw ValidationError("fit: need threads >= 1");
  gp.validate();
}

void LambdaGrid::validate() const {
  if (values.empty()) throw ValidationError("lambda grid: empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw ValidationError("lambda grid: values must be finite and >= 0");
    if (i > 0 && values[i] < values[i - 1])
      throw ValidationError("lambda grid: values must be ascending");
  }
}

ModelParams random_init(Index k, Index l, Index d, Rng& rng) {
  if (k < 1 || l < 1 || l > k || d < 1)
    throw ValidationError("init: need k >= 1, d >= 1, 1 <= l <= k");
  ModelParams p;
  std::gamma_distribution<double> gamma(5.0, 1.0);
  p.xi.resize(k);
  for (Index i = 0; i < k; ++i) p.xi(i) = gamma(rng);
  p.xi /= p.xi.sum();
  p.mu = Eigen::VectorXd::Zero(d);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd raw(k, l);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < l; ++j) raw(i, j) = normal(rng);
  p.f = project_orthonormal(raw);
  p.a.resize(d, l);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < l; ++j) p.a(i, j) = 0.1 * normal(rng);
  return p;
}

namespace {

// Minimizing the surrogate over f only needs the K x L blocks: with
// b = zbar_star a and g = a'a fixed,
//   h_f(f) = 0.125 * sum_k N_k (f_k' g f_k - 2 b_k . f_k)
// equals the full surrogate up to a constant in f.
struct ReducedFObjective {
  Eigen::MatrixXd b;  // K x L
  Eigen::MatrixXd g;  // L x L
  Eigen::VectorXd nk;

  double operator()(const Eigen::MatrixXd& f) const {
    const Eigen::MatrixXd fg = f * g;
    double total = 0.0;
    for (Index k = 0; k < f.rows(); ++k)
      total += nk(k) * (f.row(k).dot(fg.row(k)) - 2.0 * b.row(k).dot(f.row(k)));
    return 0.125 * total;
  }
};

Eigen::MatrixXd update_scores(const MajorizationState& st,
                              const Eigen::MatrixXd& f,
                              const Eigen::MatrixXd& a, const GpConfig& gp) {
  ReducedFObjective objective{st.zbar_star * a, a.transpose() * a, st.nk};
  return gp_minimize(
      objective,
      [&st, &a](const Eigen::MatrixXd& x) { return f_gradient_at(st, x, a); },
      f, gp);
}

std::vector<int> hard_assignments(const Eigen::MatrixXd& u) {
  std::vector<int> labels(static_cast<std::size_t>(u.rows()));
  for (Index i = 0; i < u.rows(); ++i) {
    Index argmax = 0;
    u.row(i).maxCoeff(&argmax);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(argmax) + 1;
  }
  return labels;
}

}  // namespace

FitReport fit_once(const Dataset& data, const FitConfig& cfg,
                   const ModelParams& init, const FitObserver& observer) {
  cfg.validate();
  init.validate();
  if (init.k() != cfg.k || init.l() != cfg.l || init.d() != data.d())
    throw ValidationError("fit: init shape does not match config and data");

  FitReport report;
  report.lambda = cfg.penalty.lambda;
  ModelParams p = init;
  double objective = penalized_objective(data, p, cfg.penalty);
  if (!std::isfinite(objective))
    throw std::runtime_error("fit: penalized objective is not finite at init");
  report.trace.push_back(objective);

  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    const Responsibilities resp = responsibilities(data, p);

    MajorizationState st = working_responses(data, p);
    weighted_means(st, resp);
    if (st.empty_cluster) report.empty_cluster = true;

    ModelParams next = p;
    next.xi = update_mixing(resp);
    next.mu = update_mu(st, resp, p);
    centered_means(st, next.mu);
    next.f = update_scores(st, p.f, p.a, cfg.gp);
    quad_coefficients(st, resp, next);
    next.a = update_loadings(st.v, st.w, p.a, cfg.penalty, data.n());
    p = std::move(next);

    const double updated = penalized_objective(data, p, cfg.penalty);
    if (!std::isfinite(updated))
      throw std::runtime_error(
          "fit: penalized objective became non-finite at iteration " +
          std::to_string(iter));
    report.trace.push_back(updated);
    report.iterations = iter;
    if (observer) observer(iter, p, updated);
    if (std::abs(updated - objective) <= cfg.outer_tol * (1.0 + std::abs(updated))) {
      report.converged = true;
      objective = updated;
      break;
    }
    objective = updated;
  }

  sign_canonicalize(p.f, p.a);
  const Responsibilities final_resp = responsibilities(data, p);
  report.params = std::move(p);
  report.penalized = objective;
  report.loglik = log_likelihood(data, report.params);
  report.df = degrees_of_freedom(report.params);
  report.bic = bic_from(report.loglik, data.n(), report.df);
  report.hard_labels = hard_assignments(final_resp.u);
  report.responsibilities = final_resp.u;
  return report;
}

FitReport fit_multistart(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  std::vector<FitReport> results(static_cast<std::size_t>(cfg.n_starts));
  parallel_for(cfg.n_starts, cfg.threads, [&](int s) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    const ModelParams init =
        random_init(cfg.k, cfg.l, data.d(), rng);
    results[static_cast<std::size_t>(s)] = fit_once(data, cfg, init);
  });
  int best = 0;
  for (int s = 1; s < cfg.n_starts; ++s)
    if (results[static_cast<std::size_t>(s)].penalized >
        results[static_cast<std::size_t>(best)].penalized)
      best = s;
  FitReport winner = std::move(results[static_cast<std::size_t>(best)]);
  winner.best_start = best;
  return winner;
}

LambdaGrid default_lambda_grid(const Dataset& data, const FitConfig& cfg,
                               int size) {
  cfg.validate();
  if (size < 2) throw ValidationError("lambda grid: need size >= 2");

  // Mirror the first EM iteration of start 0 at lambda numerically zero,
  // stopping after the f update; max |v_dl| / (4N) is then the smallest
  // weight that soft-thresholds every loading coordinate to zero.
  Rng rng(derive_seed(cfg.seed, 0));
  ModelParams p = random_init(cfg.k, cfg.l, data.d(), rng);
  const Responsibilities resp = responsibilities(data, p);
  MajorizationState st = working_responses(data, p);
  weighted_means(st, resp);
  ModelParams next = p;
  next.xi = update_mixing(resp);
  next.mu = update_mu(st, resp, p);
  centered_means(st, next.mu);
  next.f = update_scores(st, p.f, p.a, cfg.gp);
  quad_coefficients(st, resp, next);
  const double lambda_max = st.v.cwiseAbs().maxCoeff() /
                            (4.0 * static_cast<double>(data.n()));

  const double lo = 1e-4;
  const double hi = std::max(lambda_max, 2.0 * lo);
  LambdaGrid grid;
  grid.values.resize(static_cast<std::size_t>(size));
  const double step = (std::log(hi) - std::log(lo)) / (size - 1);
  for (int i = 0; i < size; ++i)
    grid.values[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * i);
  grid.values.front() = lo;
  grid.values.back() = hi;
  grid.validate();
  return grid;
}

LambdaSelection select_lambda(const Dataset& data, const FitConfig& cfg,
                              const LambdaGrid& grid) {
  cfg.validate();
  grid.validate();
  LambdaSelection out;
  bool have_best = false;
  double best_bic = 0.0;
  for (double lambda : grid.values) {
    FitConfig run = cfg;
    run.penalty.lambda = lambda;
    FitReport report = fit_multistart(data, run);
    LambdaTableRow row;
    row.lambda = lambda;
    row.loglik = report.loglik;
    row.df = report.df;
    row.bic = report.bic;
    row.nonzeros = count_nonzeros(report.params.a);
    out.table.push_back(row);
    // `<=` walks exact ties toward the larger lambda (the sparser fit).
    if (!have_best || report.bic <= best_bic) {
      have_best = true;
      best_bic = report.bic;
      out.best_lambda = lambda;
      out.report = std::move(report);
    }
  }
  return out;
}

}  // namespace clusbird
