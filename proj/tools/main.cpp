#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clusbird/bench.hpp"
#include "clusbird/fit.hpp"
#include "clusbird/metrics.hpp"
#include "clusbird/scores.hpp"

namespace {

using namespace clusbird;

std::string fmt(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<int>* labels = nullptr) {
  if (labels && static_cast<Index>(labels->size()) != m.rows())
    throw ValidationError("matrix csv: label column length mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt(m(i, j));
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

void write_plotdata_csv(const std::string& path, const ModelParams& p) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "kind,index";
  for (Index l = 0; l < p.l(); ++l) out << ",dim" << (l + 1);
  out << '\n';
  for (Index k = 0; k < p.k(); ++k) {
    out << "centroid," << (k + 1);
    for (Index l = 0; l < p.l(); ++l) out << ',' << fmt(p.f(k, l));
    out << '\n';
  }
  for (Index d = 0; d < p.d(); ++d) {
    out << "loading," << (d + 1);
    for (Index l = 0; l < p.l(); ++l) out << ',' << fmt(p.a(d, l));
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

void write_bic_csv(const std::string& path,
                   const std::vector<LambdaTableRow>& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "lambda,loglik,df,bic,nonzeros\n";
  for (const LambdaTableRow& row : table)
    out << fmt(row.lambda) << ',' << fmt(row.loglik) << ',' << row.df << ','
        << fmt(row.bic) << ',' << row.nonzeros << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& flag) {
  std::vector<int> out;
  for (const std::string& part : split_list(text)) {
    try {
      std::size_t used = 0;
      const int value = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(value);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": cannot parse integer '" + part + "'");
    }
  }
  if (out.empty()) throw ValidationError(flag + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& flag) {
  std::vector<double> out;
  for (const std::string& part : split_list(text)) {
    try {
      std::size_t used = 0;
      const double value = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(value);
    } catch (const std::exception&) {
      throw ValidationError(flag + ": cannot parse number '" + part + "'");
    }
  }
  if (out.empty()) throw ValidationError(flag + ": empty list");
  return out;
}

std::map<int, double> parse_c_map(const std::string& text) {
  std::map<int, double> out;
  for (const std::string& part : split_list(text)) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw ValidationError("--c-map: expected d:c pairs, got '" + part + "'");
    try {
      out[std::stoi(part.substr(0, colon))] = std::stod(part.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("--c-map: cannot parse pair '" + part + "'");
    }
  }
  if (out.empty()) throw ValidationError("--c-map: empty map");
  return out;
}

void print_fit_summary(const FitReport& report) {
  std::cout << "# lambda " << fmt(report.lambda) << '\n'
            << "# loglik " << fmt(report.loglik) << '\n'
            << "# penalized " << fmt(report.penalized) << '\n'
            << "# bic " << fmt(report.bic) << '\n'
            << "# nonzeros " << count_nonzeros(report.params.a) << '\n'
            << "# iterations " << report.iterations << " converged "
            << (report.converged ? 1 : 0) << " best_start "
            << report.best_start << '\n';
  if (report.empty_cluster)
    std::cout << "# warning: a cluster collapsed below the mass guard\n";
}

struct SimulateArgs {
  SimulationDesign design;
  std::string mixing;
  std::string out = "sim";
};

int run_simulate(SimulateArgs& args) {
  if (!args.mixing.empty())
    args.design.mixing = parse_double_list(args.mixing, "--mixing");
  const SimulatedSample sample = simulate(args.design);
  const double ll = log_likelihood(sample.data, sample.truth);
  const double b =
      bic_from(ll, sample.data.n(), degrees_of_freedom(sample.truth));
  write_csv(sample.data, args.out + "_data.csv");
  write_labels(args.out + "_labels.txt", sample.labels);
  save_model(args.out + "_params.json", sample.truth, 0.0, ll, b);
  std::cout << "# wrote " << args.out << "_data.csv (" << sample.data.n()
            << " x " << sample.data.d() << ")\n"
            << "# wrote " << args.out << "_labels.txt\n"
            << "# wrote " << args.out << "_params.json\n";
  return 0;
}

struct FitArgs {
  std::string data;
  FitConfig cfg;
  double lambda = 0.0;
  bool auto_lambda = false;
  bool have_lambda = false;
  int grid_size = 20;
  bool header = false;
  std::string out = "fit";
};

int run_fit(FitArgs& args) {
  if (args.have_lambda == args.auto_lambda)
    throw ValidationError("fit: pass exactly one of --lambda and --auto-lambda");
  const Dataset data = load_csv(args.data, args.header);
  FitReport report;
  if (args.auto_lambda) {
    const LambdaGrid grid = default_lambda_grid(data, args.cfg, args.grid_size);
    LambdaSelection sel = select_lambda(data, args.cfg, grid);
    report = std::move(sel.report);
  } else {
    args.cfg.penalty.lambda = args.lambda;
    report = fit_multistart(data, args.cfg);
  }
  save_model(args.out + "_model.json", report.params, report.lambda,
             report.loglik, report.bic);
  write_matrix_csv(args.out + "_responsibilities.csv", report.responsibilities);
  write_labels(args.out + "_labels.txt", report.hard_labels);
  write_plotdata_csv(args.out + "_plotdata.csv", report.params);
  print_fit_summary(report);
  std::cout << "# wrote " << args.out << "_model.json, "
            << args.out << "_responsibilities.csv, " << args.out
            << "_labels.txt, " << args.out << "_plotdata.csv\n";
  return 0;
}

struct SelectArgs {
  std::string data;
  FitConfig cfg;
  std::string grid;
  int grid_size = 20;
  bool header = false;
  std::string out = "select";
};

int run_select(SelectArgs& args) {
  const Dataset data = load_csv(args.data, args.header);
  LambdaGrid grid;
  if (args.grid.empty()) {
    grid = default_lambda_grid(data, args.cfg, args.grid_size);
  } else {
    grid.values = parse_double_list(args.grid, "--grid");
    std::sort(grid.values.begin(), grid.values.end());
    grid.validate();
  }
  LambdaSelection sel = select_lambda(data, args.cfg, grid);
  write_bic_csv(args.out + "_bic.csv", sel.table);
  save_model(args.out + "_model.json", sel.report.params, sel.best_lambda,
             sel.report.loglik, sel.report.bic);
  std::cout << "# grid size " << sel.table.size() << '\n'
            << "# best lambda " << fmt(sel.best_lambda) << '\n';
  print_fit_summary(sel.report);
  std::cout << "# wrote " << args.out << "_bic.csv, " << args.out
            << "_model.json\n";
  return 0;
}

struct ScoresArgs {
  std::string data;
  std::string model;
  bool header = false;
  bool with_labels = false;
  std::string out = "scores.csv";
};

int run_scores(ScoresArgs& args) {
  const Dataset data = load_csv(args.data, args.header);
  const LoadedModel model = load_model(args.model);
  if (model.params.d() != data.d())
    throw ValidationError("scores: model was fit on D=" +
                          std::to_string(model.params.d()) +
                          " variables, data has D=" +
                          std::to_string(data.d()));
  if ((model.params.a.array() == 0.0).all())
    std::cout << "# warning: all loadings are zero; scores stay at the "
                 "responsibility-weighted initializer\n";
  const Eigen::MatrixXd g = estimate_scores(data, model.params);
  if (args.with_labels) {
    const Responsibilities resp = responsibilities(data, model.params);
    std::vector<int> labels(static_cast<std::size_t>(resp.u.rows()));
    for (Index i = 0; i < resp.u.rows(); ++i) {
      Index argmax = 0;
      resp.u.row(i).maxCoeff(&argmax);
      labels[static_cast<std::size_t>(i)] = static_cast<int>(argmax) + 1;
    }
    write_matrix_csv(args.out, g, &labels);
  } else {
    write_matrix_csv(args.out, g);
  }
  std::cout << "# wrote " << args.out << " (" << g.rows() << " x " << g.cols()
            << (args.with_labels ? " + labels" : "") << ")\n";
  return 0;
}

struct EvalArgs {
  std::string labels_a;
  std::string labels_b;
};

int run_eval(const EvalArgs& args) {
  const std::vector<int> a = load_labels(args.labels_a);
  const std::vector<int> b = load_labels(args.labels_b);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", adjusted_rand_index(a, b));
  std::cout << buffer << '\n';
  return 0;
}

struct BenchArgs {
  ExperimentGrid grid;
  FitConfig cfg;
  std::string n_list = "100,300";
  std::string d_list = "10";
  std::string m_list = "0.5,1.0";
  std::string c_map;
  bool tune_per_rep = false;
  std::string out = "results.csv";
  std::string summary;
};

int run_bench(BenchArgs& args) {
  args.grid.n_values = parse_int_list(args.n_list, "--n-list");
  args.grid.d_values = parse_int_list(args.d_list, "--d-list");
  args.grid.m_values = parse_double_list(args.m_list, "--m-list");
  if (!args.c_map.empty()) args.grid.c_map = parse_c_map(args.c_map);
  args.grid.tune_first_rep_only = !args.tune_per_rep;
  const std::vector<BenchRow> rows = run_grid(args.grid, args.cfg);
  write_results_csv(args.out, rows);
  std::cout << "# wrote " << args.out << " (" << rows.size() << " rows)\n";
  const std::vector<CellSummary> cells = summarize(rows);
  for (const CellSummary& cell : cells)
    std::cout << "# cell n=" << cell.n << " d=" << cell.d << " m="
              << fmt(cell.m) << " ari min=" << fmt(cell.min) << " q1="
              << fmt(cell.q1) << " median=" << fmt(cell.median) << " q3="
              << fmt(cell.q3) << " max=" << fmt(cell.max) << '\n';
  if (!args.summary.empty()) {
    write_summary_csv(args.summary, cells);
    std::cout << "# wrote " << args.summary << '\n';
  }
  return 0;
}

void add_fit_knobs(CLI::App* cmd, FitConfig& cfg, bool with_starts = true) {
  cmd->add_option("--k", cfg.k, "Number of clusters")->required();
  cmd->add_option("--l", cfg.l, "Subspace dimension")->required();
  if (with_starts)
    cmd->add_option("--starts", cfg.n_starts, "Random initializations")
        ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_outer_iters, "Outer iteration cap")
      ->capture_default_str();
  cmd->add_option("--tol", cfg.outer_tol,
                  "Relative penalized-objective stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "Worker threads")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Model-based clustering of binary data with sparse low-dimensional "
      "cluster centroids"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a synthetic sample with known structure");
  sim->add_option("--n", sim_args.design.n, "Observations")
      ->capture_default_str();
  sim->add_option("--d", sim_args.design.d, "Binary variables")
      ->capture_default_str();
  sim->add_option("--k", sim_args.design.k, "Clusters")->capture_default_str();
  sim->add_option("--l", sim_args.design.l, "Subspace dimension")
      ->capture_default_str();
  sim->add_option("--m", sim_args.design.m,
                  "Proportion of informative variables, in (0, 1]")
      ->capture_default_str();
  sim->add_option("--c", sim_args.design.c, "Informative loading magnitude")
      ->capture_default_str();
  sim->add_option("--seed", sim_args.design.seed, "RNG seed")
      ->capture_default_str();
  sim->add_option("--mixing", sim_args.mixing,
                  "Comma-separated mixing proportions (default uniform)");
  sim->add_flag("--rotate", sim_args.design.rotate,
                "Apply a random rotation to the centroid configuration");
  sim->add_option("--out", sim_args.out, "Output path prefix")
      ->capture_default_str();

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit the mixture at a fixed or BIC-selected penalty");
  fit->add_option("--data", fit_args.data, "Binary data CSV")->required();
  add_fit_knobs(fit, fit_args.cfg);
  CLI::Option* lambda_opt =
      fit->add_option("--lambda", fit_args.lambda, "L1 penalty weight");
  fit->add_flag("--auto-lambda", fit_args.auto_lambda,
                "Select the penalty by BIC over the default grid");
  fit->add_option("--grid-size", fit_args.grid_size,
                  "Grid resolution for --auto-lambda")
      ->capture_default_str();
  fit->add_flag("--header", fit_args.header, "Data CSV has a header row");
  fit->add_option("--out", fit_args.out, "Output path prefix")
      ->capture_default_str();

  SelectArgs select_args;
  CLI::App* select = app.add_subcommand(
      "select", "Tune the penalty by BIC and keep the winning fit");
  select->add_option("--data", select_args.data, "Binary data CSV")
      ->required();
  add_fit_knobs(select, select_args.cfg);
  select->add_option("--grid", select_args.grid,
                     "Comma-separated penalty weights (default: log-spaced)");
  select->add_option("--grid-size", select_args.grid_size,
                     "Default grid resolution")
      ->capture_default_str();
  select->add_flag("--header", select_args.header,
                   "Data CSV has a header row");
  select->add_option("--out", select_args.out, "Output path prefix")
      ->capture_default_str();

  ScoresArgs scores_args;
  CLI::App* scores = app.add_subcommand(
      "scores", "Estimate per-observation subspace scores under a fitted model");
  scores->add_option("--data", scores_args.data, "Binary data CSV")
      ->required();
  scores->add_option("--model", scores_args.model, "Fitted model JSON")
      ->required();
  scores->add_flag("--header", scores_args.header,
                   "Data CSV has a header row");
  scores->add_flag("--with-labels", scores_args.with_labels,
                   "Append the hard cluster label as a last column");
  scores->add_option("--out", scores_args.out, "Output CSV path")
      ->capture_default_str();

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Adjusted Rand index between two label files");
  eval->add_option("--labels-a", eval_args.labels_a, "First label file")
      ->required();
  eval->add_option("--labels-b", eval_args.labels_b, "Second label file")
      ->required();

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Run the synthetic recovery study over an (n, d, m) grid");
  bench->add_option("--n-list", bench_args.n_list, "Sample sizes")
      ->capture_default_str();
  bench->add_option("--d-list", bench_args.d_list, "Dimensions")
      ->capture_default_str();
  bench->add_option("--m-list", bench_args.m_list,
                    "Informative-variable proportions")
      ->capture_default_str();
  bench->add_option("--reps", bench_args.grid.replications,
                    "Replications per cell")
      ->capture_default_str();
  bench->add_option("--starts", bench_args.grid.starts,
                    "Random initializations per fit")
      ->capture_default_str();
  bench->add_option("--seed", bench_args.grid.seed, "RNG seed")
      ->capture_default_str();
  bench->add_option("--k", bench_args.cfg.k, "Clusters")
      ->capture_default_str();
  bench->add_option("--l", bench_args.cfg.l, "Subspace dimension")
      ->capture_default_str();
  bench->add_option("--threads", bench_args.grid.threads, "Worker threads")
      ->capture_default_str();
  bench->add_option("--c-map", bench_args.c_map,
                    "d:c anchors for the loading magnitude "
                    "(default 10:2.5,1000:0.5)");
  bench->add_option("--grid-size", bench_args.grid.grid_size,
                    "Penalty grid resolution per tuning run")
      ->capture_default_str();
  bench->add_flag("--tune-per-rep", bench_args.tune_per_rep,
                  "Tune the penalty on every replication, not just the first");
  bench->add_option("--out", bench_args.out, "Results CSV path")
      ->capture_default_str();
  bench->add_option("--summary", bench_args.summary,
                    "Optional per-cell quartile summary CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fit_args.have_lambda = lambda_opt->count() > 0;
    if (*sim) return run_simulate(sim_args);
    if (*fit) return run_fit(fit_args);
    if (*select) return run_select(select_args);
    if (*scores) return run_scores(scores_args);
    if (*eval) return run_eval(eval_args);
    if (*bench) return run_bench(bench_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
