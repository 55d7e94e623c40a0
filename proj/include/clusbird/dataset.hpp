#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clusbird/params.hpp"

namespace clusbird {

// N x D binary responses plus their sign coding q = 2y - 1, which is what
// the likelihood machinery consumes (pi(-t) = 1 - pi(t) lets every Bernoulli
// term be written pi(q * theta)).
struct Dataset {
  Eigen::MatrixXi y;  // entries in {0, 1}
  Eigen::MatrixXd q;  // entries in {-1, +1}

  Index n() const { return y.rows(); }
  Index d() const { return y.cols(); }

  // Validates entries and derives q.
  static Dataset from_binary(Eigen::MatrixXi y);
};

// Factorial-design generator: K clusters placed equidistantly (where the
// dimension allows) in an L-dimensional subspace, mu = 0, and a block loading
// matrix whose first 2*D1 rows are informative: rows [0, D1) load c on the
// first column, rows [D1, 2*D1) load c on the second (for L = 1, -c on the
// single column), and the trailing D2 = D - 2*D1 rows are zero.
struct SimulationDesign {
  int n = 100;
  int d = 10;
  int k = 3;
  int l = 2;
  double m = 1.0;  // proportion of informative variables, in (0, 1]
  double c = 2.5;  // informative loading magnitude, logit scale
  std::uint64_t seed = 0;
  std::vector<double> mixing;  // empty -> uniform 1/K
  bool rotate = false;  // extra seed-driven rotation of the centroid config

  int d1() const { return static_cast<int>(std::floor(0.5 * m * d)); }
  int d2() const { return d - 2 * d1(); }

  void validate() const;
};

struct SimulatedSample {
  Dataset data;
  std::vector<int> labels;  // 1-based true cluster ids
  ModelParams truth;
};

// CSV of 0/1 cells, optional single header row, newline-terminated. Parse
// failures name the offending cell (1-based data coordinates). Blank lines
// are ignored.
Dataset load_csv(const std::string& path, bool has_header = false);
void write_csv(const Dataset& data, const std::string& path);

// One integer label per line.
std::vector<int> load_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

// K centroid rows with orthonormal columns, sign-fixed so the first nonzero
// entry of each column is positive. Equidistant rows whenever possible
// (L = K - 1: regular simplex; L = K: orthogonal rows at distance sqrt(2));
// L = 2 with K >= 3 uses the regular K-gon, other L < K - 1 the leading
// simplex coordinates.
Eigen::MatrixXd equidistant_centroids(int k, int l);

// Deterministic given the design: draw order is rotation (when enabled),
// labels, then responses row-major.
SimulatedSample simulate(const SimulationDesign& design);

}  // namespace clusbird
