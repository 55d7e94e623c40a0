#include "clusbird/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include "clusbird/model.hpp"

namespace clusbird {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// K x K orthogonal Helmert matrix: constant first row, then the standard
// contrast rows. Its trailing K-1 rows span the centered subspace, and the
// transposed sub-block places K points equidistantly (a regular simplex).
Eigen::MatrixXd helmert(int k) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
  h.row(0).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
  for (int j = 2; j <= k; ++j) {
    const double s = 1.0 / std::sqrt(static_cast<double>(j) * (j - 1));
    for (int i = 0; i < j - 1; ++i) h(j - 1, i) = s;
    h(j - 1, j - 1) = -(j - 1) * s;
  }
  return h;
}

Eigen::MatrixXd thin_q_with_sign_fix(const Eigen::MatrixXd& raw) {
  const Eigen::Index rows = raw.rows(), cols = raw.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  for (Eigen::Index l = 0; l < cols; ++l) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (std::abs(q(i, l)) > 1e-12) {
        if (q(i, l) < 0) q.col(l) = -q.col(l);
        break;
      }
    }
  }
  return q;
}

Eigen::MatrixXd random_orthogonal(int l, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd g(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) g(i, j) = nd(rng);
  return thin_q_with_sign_fix(g);
}

}  // namespace

Dataset Dataset::from_binary(Eigen::MatrixXi y) {
  if (y.rows() < 1 || y.cols() < 1)
    throw ValidationError("dataset: need at least one row and one column");
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      if (y(i, j) != 0 && y(i, j) != 1)
        throw ValidationError("dataset: entry at row " + std::to_string(i + 1) +
                              ", column " + std::to_string(j + 1) + " is " +
                              std::to_string(y(i, j)) + "; expected 0 or 1");
  Dataset out;
  out.q = (y.cast<double>().array() * 2.0 - 1.0).matrix();
  out.y = std::move(y);
  return out;
}

void SimulationDesign::validate() const {
  if (n < 1) throw ValidationError("simulate: n must be >= 1");
  if (d < 1) throw ValidationError("simulate: d must be >= 1");
  if (k < 1) throw ValidationError("simulate: k must be >= 1");
  if (l < 1 || l > k)
    throw ValidationError(
        "simulate: need 1 <= l <= k (orthonormal columns of the k x l "
        "centroid matrix require l <= k)");
  if (!(m > 0.0) || m > 1.0)
    throw ValidationError("simulate: m must lie in (0, 1]");
  if (c < 0.0 || !std::isfinite(c))
    throw ValidationError("simulate: c must be finite and >= 0");
  if (!mixing.empty()) {
    if (static_cast<int>(mixing.size()) != k)
      throw ValidationError("simulate: mixing must list exactly k proportions");
    double sum = 0.0;
    for (double w : mixing) {
      if (!(w > 0.0)) throw ValidationError("simulate: mixing must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-8)
      throw ValidationError("simulate: mixing must sum to 1");
  }
}

Dataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");

  std::vector<std::vector<int>> rows;
  std::string line;
  Eigen::Index n_cols = -1;
  long data_row = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    ++data_row;
    const auto cells = split_csv_line(line);
    if (n_cols < 0) {
      n_cols = static_cast<Eigen::Index>(cells.size());
    } else if (static_cast<Eigen::Index>(cells.size()) != n_cols) {
      throw ValidationError(path + ": row " + std::to_string(data_row) +
                            " has " + std::to_string(cells.size()) +
                            " cells; expected " + std::to_string(n_cols));
    }
    std::vector<int> parsed(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string cell = trimmed(cells[j]);
      if (cell == "0") {
        parsed[j] = 0;
      } else if (cell == "1") {
        parsed[j] = 1;
      } else {
        throw ValidationError(path + ": cell at row " +
                              std::to_string(data_row) + ", column " +
                              std::to_string(j + 1) + " is '" + cell +
                              "'; expected 0 or 1");
      }
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.empty())
    throw ValidationError(path + ": no data rows found");

  Eigen::MatrixXi y(static_cast<Eigen::Index>(rows.size()), n_cols);
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < n_cols; ++j) y(i, j) = rows[i][j];
  return Dataset::from_binary(std::move(y));
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (Eigen::Index i = 0; i < data.y.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.y.cols(); ++j) {
      if (j) out << ',';
      out << data.y(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::vector<int> labels;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string cell = trimmed(line);
    if (cell.empty()) continue;
    ++row;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size() || value < 0)
      throw ValidationError(path + ": line " + std::to_string(row) + " is '" +
                            cell + "'; expected a nonnegative integer label");
    labels.push_back(value);
  }
  if (labels.empty()) throw ValidationError(path + ": no labels found");
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int v : labels) out << v << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

Eigen::MatrixXd equidistant_centroids(int k, int l) {
  if (k < 1 || l < 1 || l > k)
    throw ValidationError("equidistant_centroids: need 1 <= l <= k");

  Eigen::MatrixXd raw;
  if (l == k) {
    raw = helmert(k).transpose();
  } else if (l == 2 && k >= 3) {
    raw.resize(k, 2);
    for (int i = 0; i < k; ++i) {
      const double angle = 2.0 * M_PI * i / k;
      raw(i, 0) = std::cos(angle);
      raw(i, 1) = std::sin(angle);
    }
  } else {
    raw = helmert(k).bottomRows(k - 1).transpose().leftCols(l);
  }

  // Unit RMS row norm, then orthonormalize. Every branch above has
  // orthogonal equal-norm columns, so QR only rescales and fixes signs.
  raw *= std::sqrt(static_cast<double>(k) / raw.squaredNorm());
  return thin_q_with_sign_fix(raw);
}

SimulatedSample simulate(const SimulationDesign& design) {
  design.validate();
  const int n = design.n, d = design.d, k = design.k, l = design.l;
  const int d1 = design.d1();

  Rng rng(design.seed);

  ModelParams truth;
  truth.xi = design.mixing.empty()
                 ? Eigen::VectorXd::Constant(k, 1.0 / k).eval()
                 : Eigen::Map<const Eigen::VectorXd>(design.mixing.data(), k)
                       .eval();
  truth.mu = Eigen::VectorXd::Zero(d);
  truth.f = equidistant_centroids(k, l);
  if (design.rotate) truth.f = truth.f * random_orthogonal(l, rng);

  truth.a = Eigen::MatrixXd::Zero(d, l);
  for (int i = 0; i < d1; ++i) truth.a(i, 0) = design.c;
  for (int i = d1; i < 2 * d1; ++i) {
    // With a single loading column the second informative block points the
    // other way so the two blocks stay distinguishable.
    if (l >= 2)
      truth.a(i, 1) = design.c;
    else
      truth.a(i, 0) = -design.c;
  }
  truth.validate();

  // Cumulative inverse-CDF label draws keep the stream layout explicit.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = unif(rng);
    double acc = 0.0;
    int lab = k;
    for (int j = 0; j < k; ++j) {
      acc += truth.xi(j);
      if (u < acc) {
        lab = j + 1;
        break;
      }
    }
    labels[static_cast<std::size_t>(i)] = lab;
  }

  const Eigen::MatrixXd theta = canonical_theta(truth);
  Eigen::MatrixXi y(n, d);
  for (int i = 0; i < n; ++i) {
    const int lab = labels[static_cast<std::size_t>(i)] - 1;
    for (int j = 0; j < d; ++j)
      y(i, j) = unif(rng) < inverse_logit(theta(lab, j)) ? 1 : 0;
  }

  SimulatedSample out;
  out.data = Dataset::from_binary(std::move(y));
  out.labels = std::move(labels);
  out.truth = std::move(truth);
  return out;
}

}  // namespace clusbird
