#include "clusbird/metrics.hpp"

#include "clusbird/params.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace clusbird {

namespace {

long long choose2(long long n) { return n * (n - 1) / 2; }

std::vector<int> dense_labels(const std::vector<int>& raw) {
  std::map<int, int> ids;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = ids.emplace(raw[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

}  // namespace

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b,
                           bool* degenerate) {
  if (a.size() != b.size())
    throw ValidationError("ari: partitions must have equal length");
  if (a.size() < 2) throw ValidationError("ari: need at least two objects");
  if (degenerate) *degenerate = false;

  const std::vector<int> la = dense_labels(a);
  const std::vector<int> lb = dense_labels(b);
  const int ra = 1 + *std::max_element(la.begin(), la.end());
  const int rb = 1 + *std::max_element(lb.begin(), lb.end());
  std::vector<long long> counts(static_cast<std::size_t>(ra) * rb, 0);
  for (std::size_t i = 0; i < la.size(); ++i)
    ++counts[static_cast<std::size_t>(la[i]) * rb + lb[i]];

  long long ss = 0, sa = 0, sb = 0;
  std::vector<long long> row_sums(ra, 0), col_sums(rb, 0);
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < rb; ++j) {
      const long long nij = counts[static_cast<std::size_t>(i) * rb + j];
      ss += choose2(nij);
      row_sums[static_cast<std::size_t>(i)] += nij;
      col_sums[static_cast<std::size_t>(j)] += nij;
    }
  for (long long s : row_sums) sa += choose2(s);
  for (long long s : col_sums) sb += choose2(s);
  const long long total = choose2(static_cast<long long>(a.size()));

  const double index = static_cast<double>(ss);
  const double expected = static_cast<double>(sa) * static_cast<double>(sb) /
                          static_cast<double>(total);
  const double maxi =
      0.5 * (static_cast<double>(sa) + static_cast<double>(sb));
  if (std::abs(maxi - expected) <= 1e-12 * std::max(1.0, std::abs(maxi))) {
    if (degenerate) *degenerate = true;
    // Both all-singletons or both one block: agreement means the contingency
    // table is a bijection between the two label sets.
    bool bijection = (ra == rb);
    for (int i = 0; bijection && i < ra; ++i) {
      int nonzero = 0;
      for (int j = 0; j < rb; ++j)
        if (counts[static_cast<std::size_t>(i) * rb + j] > 0) ++nonzero;
      bijection = (nonzero == 1);
    }
    for (int j = 0; bijection && j < rb; ++j) {
      int nonzero = 0;
      for (int i = 0; i < ra; ++i)
        if (counts[static_cast<std::size_t>(i) * rb + j] > 0) ++nonzero;
      bijection = (nonzero == 1);
    }
    return bijection ? 1.0 : 0.0;
  }
  return (index - expected) / (maxi - expected);
}

SupportRecovery support_recovery(const Eigen::MatrixXd& true_a,
                                 const Eigen::MatrixXd& est_a) {
  if (true_a.rows() != est_a.rows() || true_a.cols() != est_a.cols())
    throw ValidationError("support: loading shapes differ");
  const Index l = true_a.cols();
  if (l < 1) throw ValidationError("support: need at least one column");

  Eigen::MatrixXd affinity(l, l);
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < l; ++j)
      affinity(i, j) = std::abs(true_a.col(i).dot(est_a.col(j)));

  std::vector<int> best_map(static_cast<std::size_t>(l));
  if (l <= 3) {
    std::vector<int> perm(static_cast<std::size_t>(l));
    std::iota(perm.begin(), perm.end(), 0);
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (Index i = 0; i < l; ++i)
        score += affinity(i, perm[static_cast<std::size_t>(i)]);
      if (score > best_score) {
        best_score = score;
        best_map = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> used_true(static_cast<std::size_t>(l), false);
    std::vector<bool> used_est(static_cast<std::size_t>(l), false);
    for (Index pick = 0; pick < l; ++pick) {
      double best = -1.0;
      Index bi = -1, bj = -1;
      for (Index i = 0; i < l; ++i) {
        if (used_true[static_cast<std::size_t>(i)]) continue;
        for (Index j = 0; j < l; ++j) {
          if (used_est[static_cast<std::size_t>(j)]) continue;
          if (affinity(i, j) > best) {
            best = affinity(i, j);
            bi = i;
            bj = j;
          }
        }
      }
      used_true[static_cast<std::size_t>(bi)] = true;
      used_est[static_cast<std::size_t>(bj)] = true;
      best_map[static_cast<std::size_t>(bi)] = static_cast<int>(bj);
    }
  }

  SupportRecovery out;
  out.column_map = best_map;
  long zeros = 0, zeros_kept = 0, nonzeros = 0, nonzeros_kept = 0;
  for (Index col = 0; col < l; ++col) {
    const Index mapped = best_map[static_cast<std::size_t>(col)];
    for (Index d = 0; d < true_a.rows(); ++d) {
      const bool true_zero = (true_a(d, col) == 0.0);
      const bool est_zero = (est_a(d, mapped) == 0.0);
      if (true_zero) {
        ++zeros;
        if (est_zero) ++zeros_kept;
      } else {
        ++nonzeros;
        if (!est_zero) ++nonzeros_kept;
      }
    }
  }
  out.true_zero_rate =
      zeros == 0 ? 1.0 : static_cast<double>(zeros_kept) / zeros;
  out.true_nonzero_rate =
      nonzeros == 0 ? 1.0 : static_cast<double>(nonzeros_kept) / nonzeros;
  return out;
}

}  // namespace clusbird
