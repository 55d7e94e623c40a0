#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "clusbird/model.hpp"
#include "clusbird/stiefel.hpp"

namespace clusbird {

struct FitConfig {
  int k = 3;
  int l = 2;
  PenaltySpec penalty{};
  int max_outer_iters = 500;
  double outer_tol = 1e-7;  // relative penalized-objective change
  int n_starts = 50;
  std::uint64_t seed = 0;
  int threads = 1;  // multistart parallelism; results are schedule-invariant
  GpConfig gp{};

  void validate() const;
};

struct LambdaGrid {
  std::vector<double> values;  // ascending, nonnegative

  void validate() const;
};

// Random initialization: xi from a symmetric Dirichlet(5), mu = 0, f the
// projection of a standard normal K x L matrix, a ~ Normal(0, sd 0.1).
ModelParams random_init(Index k, Index l, Index d, Rng& rng);

// Called after each outer iteration with the updated params; used by tests
// to observe per-iteration state.
using FitObserver =
    std::function<void(int iteration, const ModelParams& p, double penalized)>;

// One EM run from an explicit initialization. Each outer iteration refreshes
// responsibilities, then updates xi, mu, f (gradient projection), and a
// (coordinate descent) against working responses anchored at the iteration's
// entry parameters. Stops when the penalized objective's relative change is
// <= outer_tol or at max_outer_iters. The trace never decreases beyond
// rounding; the returned f is sign-canonicalized (with a flipped to match).
FitReport fit_once(const Dataset& data, const FitConfig& cfg,
                   const ModelParams& init, const FitObserver& observer = {});

// Runs n_starts independent initializations (seed stream derived per start)
// and keeps the largest penalized objective; ties pick the lower start index.
// Identical inputs give bitwise-identical winners regardless of threads.
FitReport fit_multistart(const Dataset& data, const FitConfig& cfg);

struct LambdaTableRow {
  double lambda = 0.0;
  double loglik = 0.0;
  long df = 0;
  double bic = 0.0;
  long nonzeros = 0;
};

struct LambdaSelection {
  double best_lambda = 0.0;
  FitReport report;
  std::vector<LambdaTableRow> table;  // one row per grid value, ascending
};

// 20 log-spaced values on [1e-4, lambda_max], where lambda_max is the
// smallest weight that keeps a = 0 a fixed point of the loading update after
// one EM iteration from start 0's initialization (max |v_dl| / (4N)).
LambdaGrid default_lambda_grid(const Dataset& data, const FitConfig& cfg,
                               int size = 20);

// Multistart fit per grid value; picks the smallest BIC, resolving exact
// ties toward the larger lambda.
LambdaSelection select_lambda(const Dataset& data, const FitConfig& cfg,
                              const LambdaGrid& grid);

}  // namespace clusbird
