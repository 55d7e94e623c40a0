#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clusbird/bench.hpp"
#include "clusbird/fit.hpp"
#include "clusbird/metrics.hpp"
#include "clusbird/scores.hpp"

namespace py = pybind11;
using namespace clusbird;

namespace {

FitConfig make_config(int k, int l, double lam, int n_starts,
                      std::uint64_t seed, int max_iters, double tol,
                      int threads) {
  FitConfig cfg;
  cfg.k = k;
  cfg.l = l;
  cfg.penalty.lambda = lam;
  cfg.n_starts = n_starts;
  cfg.seed = seed;
  cfg.max_outer_iters = max_iters;
  cfg.outer_tol = tol;
  cfg.threads = threads;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_clusbird, m) {
  m.doc() =
      "Model-based clustering of binary data with sparse low-dimensional "
      "cluster centroids";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](Eigen::VectorXd xi, Eigen::VectorXd mu,
                       Eigen::MatrixXd f, Eigen::MatrixXd a) {
             ModelParams p{std::move(xi), std::move(mu), std::move(f),
                           std::move(a)};
             p.validate();
             return p;
           }),
           py::arg("xi"), py::arg("mu"), py::arg("f"), py::arg("a"))
      .def_readwrite("xi", &ModelParams::xi)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("f", &ModelParams::f)
      .def_readwrite("a", &ModelParams::a)
      .def_property_readonly("k", &ModelParams::k)
      .def_property_readonly("l", &ModelParams::l)
      .def_property_readonly("d", &ModelParams::d)
      .def("validate", &ModelParams::validate);

  py::class_<FitReport>(m, "FitReport")
      .def_readonly("params", &FitReport::params)
      // lambda is a Python keyword; expose the penalty weight as `lam`.
      .def_readonly("lam", &FitReport::lambda)
      .def_readonly("loglik", &FitReport::loglik)
      .def_readonly("penalized", &FitReport::penalized)
      .def_readonly("df", &FitReport::df)
      .def_readonly("bic", &FitReport::bic)
      .def_readonly("trace", &FitReport::trace)
      .def_readonly("hard_labels", &FitReport::hard_labels)
      .def_readonly("responsibilities", &FitReport::responsibilities)
      .def_readonly("iterations", &FitReport::iterations)
      .def_readonly("converged", &FitReport::converged)
      .def_readonly("empty_cluster", &FitReport::empty_cluster)
      .def_readonly("best_start", &FitReport::best_start);

  m.def(
      "simulate",
      [](int n, int d, int k, int l, double m_prop, double c,
         std::uint64_t seed, const std::vector<double>& mixing, bool rotate) {
        SimulationDesign design;
        design.n = n;
        design.d = d;
        design.k = k;
        design.l = l;
        design.m = m_prop;
        design.c = c;
        design.seed = seed;
        design.mixing = mixing;
        design.rotate = rotate;
        SimulatedSample sample = simulate(design);
        return py::make_tuple(sample.data.y, sample.labels, sample.truth);
      },
      py::arg("n"), py::arg("d"), py::arg("k") = 3, py::arg("l") = 2,
      py::arg("m") = 1.0, py::arg("c") = 2.5, py::arg("seed") = 0,
      py::arg("mixing") = std::vector<double>{}, py::arg("rotate") = false,
      "Draw a synthetic sample; returns (y, labels, true_params).");

  m.def(
      "load_csv",
      [](const std::string& path, bool has_header) {
        return load_csv(path, has_header).y;
      },
      py::arg("path"), py::arg("has_header") = false);
  m.def(
      "write_csv",
      [](const Eigen::MatrixXi& y, const std::string& path) {
        write_csv(Dataset::from_binary(y), path);
      },
      py::arg("y"), py::arg("path"));

  m.def(
      "fit",
      [](const Eigen::MatrixXi& y, int k, int l, double lam, int n_starts,
         std::uint64_t seed, int max_iters, double tol, int threads) {
        const Dataset data = Dataset::from_binary(y);
        return fit_multistart(
            data, make_config(k, l, lam, n_starts, seed, max_iters, tol,
                              threads));
      },
      py::arg("y"), py::arg("k"), py::arg("l"), py::arg("lam") = 0.0,
      py::arg("n_starts") = 50, py::arg("seed") = 0,
      py::arg("max_iters") = 500, py::arg("tol") = 1e-7,
      py::arg("threads") = 1,
      "Multistart penalized fit; returns the winning FitReport.");

  m.def(
      "select_lambda",
      [](const Eigen::MatrixXi& y, int k, int l,
         const std::vector<double>& grid, int grid_size, int n_starts,
         std::uint64_t seed, int max_iters, double tol, int threads) {
        const Dataset data = Dataset::from_binary(y);
        const FitConfig cfg =
            make_config(k, l, 0.0, n_starts, seed, max_iters, tol, threads);
        LambdaGrid lambdas;
        if (grid.empty()) {
          lambdas = default_lambda_grid(data, cfg, grid_size);
        } else {
          lambdas.values = grid;
          lambdas.validate();
        }
        LambdaSelection sel = select_lambda(data, cfg, lambdas);
        py::list table;
        for (const LambdaTableRow& row : sel.table)
          table.append(py::make_tuple(row.lambda, row.loglik, row.df, row.bic,
                                      row.nonzeros));
        return py::make_tuple(sel.best_lambda, sel.report, table);
      },
      py::arg("y"), py::arg("k"), py::arg("l"),
      py::arg("grid") = std::vector<double>{}, py::arg("grid_size") = 20,
      py::arg("n_starts") = 50, py::arg("seed") = 0,
      py::arg("max_iters") = 500, py::arg("tol") = 1e-7,
      py::arg("threads") = 1,
      "BIC tuning; returns (best_lambda, report, table) where table rows are "
      "(lambda, loglik, df, bic, nonzeros).");

  m.def(
      "estimate_scores",
      [](const Eigen::MatrixXi& y, const ModelParams& fitted) {
        return estimate_scores(Dataset::from_binary(y), fitted);
      },
      py::arg("y"), py::arg("params"),
      "Post-hoc per-observation scores with orthonormal columns.");

  m.def(
      "adjusted_rand_index",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        return adjusted_rand_index(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "support_recovery",
      [](const Eigen::MatrixXd& true_a, const Eigen::MatrixXd& est_a) {
        const SupportRecovery rec = support_recovery(true_a, est_a);
        return py::make_tuple(rec.true_zero_rate, rec.true_nonzero_rate,
                              rec.column_map);
      },
      py::arg("true_a"), py::arg("est_a"),
      "Zero-pattern agreement after column matching; returns "
      "(true_zero_rate, true_nonzero_rate, column_map).");

  m.def(
      "save_model",
      [](const std::string& path, const ModelParams& p, double lam,
         double loglik, double bic_value) {
        save_model(path, p, lam, loglik, bic_value);
      },
      py::arg("path"), py::arg("params"), py::arg("lam") = 0.0,
      py::arg("loglik") = 0.0, py::arg("bic") = 0.0);
  m.def(
      "load_model",
      [](const std::string& path) {
        const LoadedModel model = load_model(path);
        return py::make_tuple(model.params, model.lambda, model.loglik,
                              model.bic);
      },
      py::arg("path"),
      "Returns (params, lam, loglik, bic) from a model JSON file.");
}
