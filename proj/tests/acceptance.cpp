// Acceptance gate: one check per shipping criterion, each printed as a
// single [PASS]/[FAIL] line with its headline numbers and wall time. The
// process exits 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clusbird/bench.hpp"
#include "clusbird/metrics.hpp"
#include "clusbird/scores.hpp"
#include "oracles.hpp"

using namespace clusbird;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3g", x);
  return buffer;
}

// 1. The quadratic tangent majorizes the logistic loss everywhere and
//    touches it at the anchor.
Outcome majorization_bound() {
  Rng rng(1001);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  const auto tangent = [](double x, double y) {
    return -log_inverse_logit(y) - (1.0 - inverse_logit(y)) * (x - y) +
           0.125 * (x - y) * (x - y);
  };
  double worst_gap = 0.0;    // most negative RHS - LHS seen
  double worst_touch = 0.0;  // largest |RHS - LHS| at x = y
  for (int trial = 0; trial < 10000; ++trial) {
    const double x = unif(rng);
    const double y = unif(rng);
    worst_gap = std::min(worst_gap, tangent(x, y) + log_inverse_logit(x));
    worst_touch = std::max(worst_touch,
                           std::abs(tangent(y, y) + log_inverse_logit(y)));
  }
  const bool pass = worst_gap >= -1e-12 && worst_touch <= 1e-12;
  return {pass, "min slack " + num(worst_gap) + ", anchor gap " +
                    num(worst_touch) + " over 10000 pairs"};
}

// 2. Every EM trace ascends the penalized objective up to rounding.
Outcome monotone_ascent() {
  Rng rng(1002);
  std::uniform_int_distribution<int> pick_n(30, 200);
  std::uniform_int_distribution<int> pick_d(5, 50);
  std::uniform_int_distribution<int> pick_k(1, 4);
  const double lambdas[4] = {0.0, 0.001, 0.01, 0.1};
  double worst = 0.0;  // most negative allowed-scaled drop
  int fits = 0, violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = pick_n(rng);
    const Index d = pick_d(rng);
    const int k = pick_k(rng);
    const int l = std::min(2, k);
    const Dataset data = oracles::random_binary_dataset(rng, n, d);
    FitConfig cfg;
    cfg.k = k;
    cfg.l = l;
    cfg.n_starts = 1;
    cfg.seed = static_cast<std::uint64_t>(trial);
    cfg.penalty.lambda = lambdas[trial % 4];
    const FitReport report = fit_multistart(data, cfg);
    ++fits;
    for (std::size_t t = 0; t + 1 < report.trace.size(); ++t) {
      const double scaled = (report.trace[t + 1] - report.trace[t]) /
                            (1.0 + std::abs(report.trace[t]));
      worst = std::min(worst, scaled);
      if (report.trace[t + 1] <
          report.trace[t] - 1e-8 * (1.0 + std::abs(report.trace[t])))
        ++violations;
    }
  }
  return {violations == 0, std::to_string(fits) + " fits, worst relative dip " +
                               num(worst) + ", " +
                               std::to_string(violations) + " violations"};
}

// 3. The analytic score-block gradient matches central finite differences.
Outcome score_gradient() {
  Rng rng(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 10 + trial, k = 2 + trial % 3, l = 1 + trial % 2,
                d = 4 + trial % 5;
    const Dataset data = oracles::random_binary_dataset(rng, n, d);
    const ModelParams p = oracles::random_params(rng, k, l, d);
    const Responsibilities resp = responsibilities(data, p);
    MajorizationState st = working_responses(data, p);
    weighted_means(st, resp);
    const Eigen::VectorXd mu = update_mu(st, resp, p);
    centered_means(st, mu);
    PenaltySpec spec;
    const auto value = [&](const Eigen::MatrixXd& f) {
      return majorizer_value(st, resp, mu, f, p.a, spec);
    };
    const Eigen::MatrixXd analytic = f_gradient_at(st, p.f, p.a);
    const Eigen::MatrixXd numeric = oracles::fd_gradient(value, p.f);
    const double rel = (analytic - numeric).norm() /
                       std::max(1.0, analytic.norm());
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-5,
          "worst norm-relative error " + num(worst) + " over 20 instances"};
}

// 4. Soft thresholding solves every scalar loading subproblem.
Outcome soft_threshold_optimality() {
  Rng rng(1004);
  std::uniform_real_distribution<double> coef(-25.0, 25.0);
  std::uniform_real_distribution<double> curv(0.2, 6.0);
  std::uniform_real_distribution<double> pen(0.0, 2.0);
  std::uniform_int_distribution<int> size(1, 500);
  double worst_sub = 0.0, worst_gap = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const double c = coef(rng);
    const double w = curv(rng);
    const double lambda = pen(rng);
    const Index n = size(rng);
    const double t = soft_threshold_update(c, w, n, lambda);
    const double threshold = 4.0 * static_cast<double>(n) * lambda;
    const double sub = t != 0.0
                           ? std::abs(w * t - c + threshold * (t > 0 ? 1 : -1))
                           : std::max(0.0, std::abs(c) - threshold);
    worst_sub = std::max(worst_sub, sub);
    const auto objective = [&](double s) {
      return 0.125 * w * s * s - 0.25 * c * s +
             static_cast<double>(n) * lambda * std::abs(s);
    };
    const double span = std::abs(c) / w + 1.0;
    const double reference = oracles::golden_section(objective, -span, span);
    worst_gap = std::max(worst_gap, std::abs(t - reference));
  }
  return {worst_sub <= 1e-8 && worst_gap <= 1e-6,
          "worst subgradient residual " + num(worst_sub) +
              ", worst search gap " + num(worst_gap) + " over 500 problems"};
}

// 5. Iterates, estimated scores, and projections stay on the manifold.
Outcome manifold_feasibility() {
  Rng rng(1005);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const Dataset data = oracles::random_binary_dataset(rng, 60, 8);
    FitConfig cfg;
    cfg.k = 3;
    cfg.l = 2;
    cfg.n_starts = 1;
    cfg.seed = static_cast<std::uint64_t>(trial);
    Rng stream(derive_seed(cfg.seed, 0));
    const ModelParams init = random_init(3, 2, 8, stream);
    fit_once(data, cfg, init, [&](int, const ModelParams& p, double) {
      worst = std::max(worst, orthonormality_defect(p.f));
    });
    const ModelParams fitted = oracles::random_params(rng, 3, 2, 8);
    const Eigen::MatrixXd g = estimate_scores(data, fitted);
    worst = std::max(worst, orthonormality_defect(g));
  }
  double worst_idem = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd m(6, 3);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 3; ++j) m(i, j) = normal(rng);
    const Eigen::MatrixXd p = project_orthonormal(m);
    worst_idem = std::max(
        worst_idem, (project_orthonormal(p) - p).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8 && worst_idem <= 1e-12,
          "worst defect " + num(worst) + ", worst reprojection drift " +
              num(worst_idem)};
}

// 6. Responsibilities stay normalized at extreme logits and D = 1000.
Outcome estep_normalization() {
  Rng rng(1006);
  std::uniform_real_distribution<double> big(-200.0, 200.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = 20, d = 1000, k = 3, l = 2;
  const Dataset data = oracles::random_binary_dataset(rng, n, d);
  ModelParams p = oracles::random_params(rng, k, l, d);
  for (Index j = 0; j < d; ++j) p.mu(j) = big(rng);
  const Responsibilities resp = responsibilities(data, p);
  double worst = 0.0;
  for (Index i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(resp.u.row(i).sum() - 1.0));
  const bool finite = resp.u.allFinite() && resp.u.minCoeff() >= 0.0;
  return {worst <= 1e-12 && finite,
          "worst row-sum error " + num(worst) + " at D=1000, |logit|<=200"};
}

// 7. The recovery study clears its quality bar and improves with N.
Outcome benchmark_recovery() {
  ExperimentGrid grid;
  grid.n_values = {100, 300};
  grid.d_values = {10};
  grid.m_values = {1.0};
  grid.replications = 10;
  grid.starts = 10;
  grid.seed = 2024;
  grid.threads = 4;
  FitConfig cfg;
  cfg.k = 3;
  cfg.l = 2;
  const std::vector<BenchRow> rows = run_grid(grid, cfg);
  const std::vector<CellSummary> cells = summarize(rows);
  if (cells.size() != 2) return {false, "expected 2 cells"};
  const double med100 = cells[0].median;
  const double med300 = cells[1].median;
  const bool pass = med100 >= 0.8 && med300 >= 0.8 && med300 >= med100;
  return {pass, "median ARI " + num(med100) + " at N=100, " + num(med300) +
                    " at N=300 (10 reps each)"};
}

// 8. BIC tuning recovers most true zero loadings; no penalty recovers fewer.
Outcome support_recovery_gate() {
  SimulationDesign design;
  design.n = 100;
  design.d = 100;
  design.k = 4;
  design.l = 2;
  design.m = 0.5;
  design.c = std::sqrt(1.25);
  design.seed = 31;
  const SimulatedSample sample = simulate(design);

  FitConfig cfg;
  cfg.k = 4;
  cfg.l = 2;
  cfg.n_starts = 10;
  cfg.seed = 8;
  cfg.threads = 4;

  const LambdaGrid grid = default_lambda_grid(sample.data, cfg);
  const LambdaSelection sel = select_lambda(sample.data, cfg, grid);
  const double tuned_rate =
      support_recovery(sample.truth.a, sel.report.params.a).true_zero_rate;

  FitConfig flat = cfg;
  flat.penalty.lambda = 0.0;
  const FitReport unpenalized = fit_multistart(sample.data, flat);
  const double flat_rate =
      support_recovery(sample.truth.a, unpenalized.params.a).true_zero_rate;

  const bool pass = tuned_rate >= 0.8 && flat_rate < tuned_rate;
  return {pass, "true-zero rate " + num(tuned_rate) + " tuned (lambda " +
                    num(sel.best_lambda) + ") vs " + num(flat_rate) +
                    " unpenalized"};
}

// 9. The contingency-table ARI equals brute-force pair counting bit for bit.
Outcome ari_equivalence() {
  Rng rng(1009);
  std::uniform_int_distribution<int> size(5, 30);
  std::uniform_int_distribution<int> label(1, 4);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = static_cast<std::size_t>(size(rng));
    std::vector<int> a(n), b(n);
    for (auto& v : a) v = label(rng);
    for (auto& v : b) v = label(rng);
    if (adjusted_rand_index(a, b) != oracles::pair_counting_ari(a, b))
      ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) +
                               " mismatches over 1000 random label pairs"};
}

// 10. On sparse truth, BIC picks a positive penalty and a sparse fit.
Outcome sparse_selection() {
  SimulationDesign design;
  design.n = 200;
  design.d = 30;
  design.k = 3;
  design.l = 2;
  design.m = 0.5;
  design.c = c_for_dimension(30, {{10, 2.5}, {1000, 0.5}});
  design.seed = 99;
  const SimulatedSample sample = simulate(design);

  FitConfig cfg;
  cfg.k = 3;
  cfg.l = 2;
  cfg.n_starts = 6;
  cfg.seed = 15;
  cfg.threads = 4;

  LambdaGrid grid = default_lambda_grid(sample.data, cfg, 10);
  grid.values.insert(grid.values.begin(), 0.0);
  const LambdaSelection sel = select_lambda(sample.data, cfg, grid);
  const long nnz = count_nonzeros(sel.report.params.a);
  const bool pass = sel.best_lambda > 0.0 && nnz < 30 * 2;
  return {pass, "selected lambda " + num(sel.best_lambda) + ", " +
                    std::to_string(nnz) + " of 60 loadings nonzero"};
}

}  // namespace

int main() {
  using Criterion = std::pair<const char*, std::function<Outcome()>>;
  const std::vector<Criterion> criteria = {
      {"majorization-bound", majorization_bound},
      {"monotone-ascent", monotone_ascent},
      {"score-gradient", score_gradient},
      {"soft-threshold-optimality", soft_threshold_optimality},
      {"manifold-feasibility", manifold_feasibility},
      {"estep-normalization", estep_normalization},
      {"benchmark-recovery", benchmark_recovery},
      {"support-recovery", support_recovery_gate},
      {"ari-equivalence", ari_equivalence},
      {"sparse-selection", sparse_selection},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %zu %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL",
                i + 1, criteria[i].first, outcome.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && outcome.pass;
  }
  return all ? 0 : 1;
}
