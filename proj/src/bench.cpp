#include "clusbird/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "clusbird/metrics.hpp"

namespace clusbird {

void ExperimentGrid::validate() const {
  if (n_values.empty() || d_values.empty() || m_values.empty())
    throw ValidationError("grid: n, d, and m value lists must be nonempty");
  for (int n : n_values)
    if (n < 2) throw ValidationError("grid: need every n >= 2");
  for (int d : d_values)
    if (d < 1) throw ValidationError("grid: need every d >= 1");
  for (double m : m_values)
    if (!(m > 0.0) || !(m <= 1.0))
      throw ValidationError("grid: need every m in (0, 1]");
  if (replications < 1) throw ValidationError("grid: need replications >= 1");
  if (starts < 1) throw ValidationError("grid: need starts >= 1");
  if (threads < 1) throw ValidationError("grid: need threads >= 1");
  if (c_map.empty()) throw ValidationError("grid: c map must be nonempty");
  for (const auto& [d, c] : c_map) {
    if (d < 1) throw ValidationError("grid: c map dimensions must be >= 1");
    if (!(c > 0.0) || !std::isfinite(c))
      throw ValidationError("grid: c map values must be positive and finite");
  }
  if (grid_size < 2) throw ValidationError("grid: need grid_size >= 2");
}

double c_for_dimension(int d, const std::map<int, double>& c_map) {
  if (c_map.empty()) throw ValidationError("c map: empty");
  if (d < 1) throw ValidationError("c map: need d >= 1");
  const auto exact = c_map.find(d);
  if (exact != c_map.end()) return exact->second;
  const auto hi = c_map.lower_bound(d);
  if (hi == c_map.begin()) return hi->second;
  if (hi == c_map.end()) return std::prev(hi)->second;
  const auto lo = std::prev(hi);
  const double t = (std::log(static_cast<double>(d)) -
                    std::log(static_cast<double>(lo->first))) /
                   (std::log(static_cast<double>(hi->first)) -
                    std::log(static_cast<double>(lo->first)));
  return std::exp(std::log(lo->second) +
                  t * (std::log(hi->second) - std::log(lo->second)));
}

std::vector<BenchRow> run_grid(const ExperimentGrid& grid,
                               const FitConfig& cfg) {
  grid.validate();
  cfg.validate();
  std::vector<BenchRow> rows;
  std::uint64_t cell_index = 0;
  for (int n : grid.n_values) {
    for (int d : grid.d_values) {
      for (double m : grid.m_values) {
        const std::uint64_t cell_seed = derive_seed(grid.seed, cell_index++);
        double cell_lambda = 0.0;
        bool have_lambda = false;
        for (int rep = 0; rep < grid.replications; ++rep) {
          const std::uint64_t rep_seed =
              derive_seed(cell_seed, static_cast<std::uint64_t>(rep));
          const auto t0 = std::chrono::steady_clock::now();

          SimulationDesign design;
          design.n = n;
          design.d = d;
          design.k = cfg.k;
          design.l = cfg.l;
          design.m = m;
          design.c = c_for_dimension(d, grid.c_map);
          design.seed = rep_seed;
          const SimulatedSample sample = simulate(design);

          FitConfig run = cfg;
          run.n_starts = grid.starts;
          run.threads = grid.threads;
          run.seed = derive_seed(rep_seed, 1);

          BenchRow row;
          row.n = n;
          row.d = d;
          row.m = m;
          row.replication = rep + 1;
          FitReport report;
          if (grid.tune_first_rep_only && have_lambda) {
            run.penalty.lambda = cell_lambda;
            report = fit_multistart(sample.data, run);
            row.lambda = cell_lambda;
          } else {
            const LambdaGrid lambdas =
                default_lambda_grid(sample.data, run, grid.grid_size);
            LambdaSelection sel = select_lambda(sample.data, run, lambdas);
            report = std::move(sel.report);
            row.lambda = sel.best_lambda;
            if (grid.tune_first_rep_only) {
              cell_lambda = sel.best_lambda;
              have_lambda = true;
            }
          }
          row.ari = adjusted_rand_index(sample.labels, report.hard_labels);
          row.nonzeros = count_nonzeros(report.params.a);
          row.seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile: empty sample");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw ValidationError("quantile: need p in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<CellSummary> summarize(const std::vector<BenchRow>& rows) {
  std::vector<CellSummary> cells;
  std::vector<std::vector<double>> aris;
  for (const BenchRow& row : rows) {
    std::size_t slot = cells.size();
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].n == row.n && cells[i].d == row.d && cells[i].m == row.m) {
        slot = i;
        break;
      }
    if (slot == cells.size()) {
      CellSummary cell;
      cell.n = row.n;
      cell.d = row.d;
      cell.m = row.m;
      cells.push_back(cell);
      aris.emplace_back();
    }
    aris[slot].push_back(row.ari);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].min = quantile_linear(aris[i], 0.0);
    cells[i].q1 = quantile_linear(aris[i], 0.25);
    cells[i].median = quantile_linear(aris[i], 0.5);
    cells[i].q3 = quantile_linear(aris[i], 0.75);
    cells[i].max = quantile_linear(aris[i], 1.0);
  }
  return cells;
}

namespace {

std::string fmt(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

}  // namespace

void write_results_csv(const std::string& path,
                       const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "n,d,m,replication,ari,nonzeros,lambda,seconds\n";
  for (const BenchRow& row : rows)
    out << row.n << ',' << row.d << ',' << fmt(row.m) << ','
        << row.replication << ',' << fmt(row.ari) << ',' << row.nonzeros
        << ',' << fmt(row.lambda) << ',' << fmt(row.seconds) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

void write_summary_csv(const std::string& path,
                       const std::vector<CellSummary>& cells) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "n,d,m,min,q1,median,q3,max\n";
  for (const CellSummary& cell : cells)
    out << cell.n << ',' << cell.d << ',' << fmt(cell.m) << ','
        << fmt(cell.min) << ',' << fmt(cell.q1) << ',' << fmt(cell.median)
        << ',' << fmt(cell.q3) << ',' << fmt(cell.max) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

}  // namespace clusbird
