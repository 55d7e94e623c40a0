#include "clusbird/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace clusbird {

using nlohmann::json;

void ModelParams::validate() const {
  const Index kk = k(), ll = l(), dd = d();
  if (kk < 1) throw ValidationError("params: need at least one cluster");
  if (dd < 1) throw ValidationError("params: need at least one variable");
  if (ll < 1 || ll > kk)
    throw ValidationError("params: need 1 <= L <= K, got L=" +
                          std::to_string(ll) + ", K=" + std::to_string(kk));
  if (f.rows() != kk)
    throw ValidationError("params: f must have one row per cluster");
  if (a.rows() != dd || a.cols() != ll)
    throw ValidationError("params: a must be D x L");
  if (!xi.allFinite() || !mu.allFinite() || !f.allFinite() || !a.allFinite())
    throw ValidationError("params: entries must be finite");
  for (Index i = 0; i < kk; ++i)
    if (!(xi(i) > 0.0))
      throw ValidationError("params: mixing proportions must be positive");
  if (std::abs(xi.sum() - 1.0) > 1e-12)
    throw ValidationError("params: mixing proportions must sum to 1");
  if (orthonormality_defect(f) > 1e-8)
    throw ValidationError("params: f must have orthonormal columns");
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ValidationError("penalty: lambda must be finite and >= 0");
}

double orthonormality_defect(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  return (gram - Eigen::MatrixXd::Identity(m.cols(), m.cols()))
      .cwiseAbs()
      .maxCoeff();
}

double inverse_logit(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_inverse_logit(double t) {
  return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

Eigen::MatrixXd canonical_theta(const ModelParams& p) {
  return ((p.f * p.a.transpose()).rowwise() + p.mu.transpose()).eval();
}

Eigen::VectorXd log_component_prob(const Dataset& data,
                                   const Eigen::VectorXd& theta_k) {
  if (theta_k.size() != data.d())
    throw ValidationError("log_component_prob: theta length must match D");
  const Eigen::ArrayXXd qt =
      data.q.array().rowwise() * theta_k.transpose().array();
  return qt.unaryExpr([](double x) { return log_inverse_logit(x); })
      .rowwise()
      .sum()
      .matrix();
}

Eigen::MatrixXd log_component_matrix(const Dataset& data,
                                     const ModelParams& p) {
  if (p.d() != data.d())
    throw ValidationError("model: params are for D=" + std::to_string(p.d()) +
                          " but data has D=" + std::to_string(data.d()));
  const Eigen::MatrixXd theta = canonical_theta(p);
  Eigen::MatrixXd logp(data.n(), p.k());
  for (Index k = 0; k < p.k(); ++k)
    logp.col(k) = log_component_prob(data, theta.row(k).transpose());
  return logp;
}

double log_likelihood(const Dataset& data, const ModelParams& p) {
  p.validate();
  Eigen::MatrixXd logw = log_component_matrix(data, p);
  logw.rowwise() += p.xi.array().log().matrix().transpose();
  double ll = 0.0;
  for (Index i = 0; i < logw.rows(); ++i) {
    const double m = logw.row(i).maxCoeff();
    ll += m + std::log((logw.row(i).array() - m).exp().sum());
  }
  return ll;
}

double penalty_value(const Eigen::MatrixXd& a, const PenaltySpec& spec) {
  spec.validate();
  return spec.lambda * a.cwiseAbs().sum();
}

double penalized_objective(const Dataset& data, const ModelParams& p,
                           const PenaltySpec& spec) {
  return log_likelihood(data, p) -
         static_cast<double>(data.n()) * penalty_value(p.a, spec);
}

long count_nonzeros(const Eigen::MatrixXd& a) {
  return static_cast<long>((a.array() != 0.0).count());
}

long degrees_of_freedom(const ModelParams& p) {
  return static_cast<long>(p.k()) + static_cast<long>(p.d()) +
         static_cast<long>(p.k()) * static_cast<long>(p.l()) +
         count_nonzeros(p.a);
}

double bic_from(double loglik, Index n, long df) {
  if (n < 1) throw ValidationError("bic: need n >= 1");
  return -2.0 * loglik +
         std::log(static_cast<double>(n)) * static_cast<double>(df);
}

double bic(const Dataset& data, const ModelParams& p) {
  return bic_from(log_likelihood(data, p), data.n(), degrees_of_freedom(p));
}

namespace {

json matrix_to_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const json& rows, Index n_rows, Index n_cols,
                               const std::string& name) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != n_rows)
    throw ValidationError("model json: field '" + name + "' must have " +
                          std::to_string(n_rows) + " rows");
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Index i = 0; i < n_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n_cols)
      throw ValidationError("model json: row " + std::to_string(i + 1) +
                            " of '" + name + "' must have " +
                            std::to_string(n_cols) + " entries");
    for (Index j = 0; j < n_cols; ++j)
      m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

Eigen::VectorXd array_to_vector(const json& arr, Index size,
                                const std::string& name) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != size)
    throw ValidationError("model json: field '" + name + "' must have " +
                          std::to_string(size) + " entries");
  Eigen::VectorXd v(size);
  for (Index i = 0; i < size; ++i)
    v(i) = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

std::string model_to_json(const ModelParams& p, double lambda, double loglik,
                          double bic_value) {
  p.validate();
  json doc;
  doc["format_version"] = 1;
  doc["K"] = p.k();
  doc["L"] = p.l();
  doc["D"] = p.d();
  doc["xi"] = json(std::vector<double>(p.xi.data(), p.xi.data() + p.xi.size()));
  doc["mu"] = json(std::vector<double>(p.mu.data(), p.mu.data() + p.mu.size()));
  doc["F"] = matrix_to_rows(p.f);
  doc["A"] = matrix_to_rows(p.a);
  doc["lambda"] = lambda;
  doc["loglik"] = loglik;
  doc["bic"] = bic_value;
  return doc.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model json: parse failure: ") +
                          e.what());
  }
  for (const char* key :
       {"format_version", "K", "L", "D", "xi", "mu", "F", "A", "lambda",
        "loglik", "bic"})
    if (!doc.contains(key))
      throw ValidationError(std::string("model json: missing field '") + key +
                            "'");
  if (doc["format_version"].get<long>() != 1)
    throw ValidationError("model json: unsupported format_version");

  LoadedModel out;
  try {
    const Index k = doc["K"].get<Index>();
    const Index l = doc["L"].get<Index>();
    const Index d = doc["D"].get<Index>();
    if (k < 1 || l < 1 || d < 1)
      throw ValidationError("model json: K, L, D must be positive");
    out.params.xi = array_to_vector(doc["xi"], k, "xi");
    out.params.mu = array_to_vector(doc["mu"], d, "mu");
    out.params.f = rows_to_matrix(doc["F"], k, l, "F");
    out.params.a = rows_to_matrix(doc["A"], d, l, "A");
    out.lambda = doc["lambda"].get<double>();
    out.loglik = doc["loglik"].get<double>();
    out.bic = doc["bic"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model json: malformed field: ") +
                          e.what());
  }
  out.params.validate();
  return out;
}

void save_model(const std::string& path, const ModelParams& p, double lambda,
                double loglik, double bic_value) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << model_to_json(p, lambda, loglik, bic_value);
  if (!out) throw IoError("failed while writing " + path);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace clusbird
