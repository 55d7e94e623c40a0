#pragma once

#include <vector>

#include <Eigen/Dense>

#include "clusbird/common.hpp"

namespace clusbird {

// Adjusted Rand index via the contingency table. Labels are arbitrary
// finite integers; both partitions need the same length N >= 2. When the
// expected index equals the maximum index (both partitions all singletons or
// both a single cluster) the value is defined as 1 if the partitions are
// identical up to relabeling, else 0; *degenerate is set when provided.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b,
                           bool* degenerate = nullptr);

struct SupportRecovery {
  double true_zero_rate = 0.0;     // share of true zeros estimated as zero
  double true_nonzero_rate = 0.0;  // share of true nonzeros kept nonzero
  std::vector<int> column_map;     // est column matched to each true column
};

// Zero-pattern agreement after matching estimated loading columns to true
// ones: exhaustive over column permutations for L <= 3, greedy by absolute
// inner product otherwise (signs never affect the zero pattern). Vacuous
// rates (no true zeros / no true nonzeros) are reported as 1.
SupportRecovery support_recovery(const Eigen::MatrixXd& true_a,
                                 const Eigen::MatrixXd& est_a);

}  // namespace clusbird
