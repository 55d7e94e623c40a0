#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clusbird/fit.hpp"

namespace clusbird {

// Synthetic recovery study over a (N, D, m) factorial grid. Each cell/
// replication simulates its own sample (seed stream derived per cell and
// replication), tunes lambda by BIC, fits, and records the adjusted Rand
// index against the true labels.
struct ExperimentGrid {
  std::vector<int> n_values;
  std::vector<int> d_values;
  std::vector<double> m_values;
  int replications = 10;
  int starts = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  // Tune lambda on the first replication of each cell only and reuse the
  // winner for the rest; mirrors the usual protocol and keeps grids cheap.
  bool tune_first_rep_only = true;
  // Loading magnitude per dimension; unlisted D interpolates log-linearly
  // between the nearest anchors (clamped outside the range).
  std::map<int, double> c_map = {{10, 2.5}, {1000, 0.5}};
  int grid_size = 20;  // lambda grid resolution per tuning run

  void validate() const;
};

double c_for_dimension(int d, const std::map<int, double>& c_map);

struct BenchRow {
  int n = 0;
  int d = 0;
  double m = 0.0;
  int replication = 0;  // 1-based
  double ari = 0.0;
  long nonzeros = 0;
  double lambda = 0.0;
  double seconds = 0.0;  // wall clock; the one nondeterministic column
};

// Rows ordered by cell (n outer, then d, then m) and replication.
std::vector<BenchRow> run_grid(const ExperimentGrid& grid,
                               const FitConfig& cfg);

struct CellSummary {
  int n = 0;
  int d = 0;
  double m = 0.0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;  // of ARI
};

// Linear-interpolation quantiles (h = (n-1)p convention).
double quantile_linear(std::vector<double> values, double p);

std::vector<CellSummary> summarize(const std::vector<BenchRow>& rows);

// CSV with header n,d,m,replication,ari,nonzeros,lambda,seconds.
void write_results_csv(const std::string& path,
                       const std::vector<BenchRow>& rows);
// CSV with header n,d,m,min,q1,median,q3,max.
void write_summary_csv(const std::string& path,
                       const std::vector<CellSummary>& cells);

}  // namespace clusbird
