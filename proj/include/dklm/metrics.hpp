#pragma once

#include <cmath>
#include <vector>

#include "dklm/spectral.hpp"

namespace dklm {

/// External clustering scores, each in [0, 1].
struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
};

namespace detail {

inline void check_lengths(const LabelVector& a, const LabelVector& b) {
  if (a.labels.size() != b.labels.size()) {
    throw InvalidInputError("metrics: label vectors differ in length");
  }
  if (a.labels.empty()) {
    throw InvalidInputError("metrics: empty label vectors");
  }
}

inline int num_classes(const LabelVector& v) {
  int m = 0;
  for (int x : v.labels) m = std::max(m, x + 1);
  return m;
}

inline std::vector<std::vector<long>> contingency(const LabelVector& truth,
                                                  const LabelVector& pred) {
  int kt = num_classes(truth), kp = num_classes(pred);
  std::vector<std::vector<long>> table(kt, std::vector<long>(kp, 0));
  for (size_t i = 0; i < truth.labels.size(); ++i) {
    ++table[truth.labels[i]][pred.labels[i]];
  }
  return table;
}

// Hungarian algorithm (potentials form) on a square cost matrix; returns the
// minimal total cost assignment as column-of-row.
inline std::vector<int> hungarian_min_cost(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> match(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] >= 1) match[p[j] - 1] = j - 1;
  }
  return match;
}

}  // namespace detail

/// Clustering accuracy: the best fraction matched over all label
/// bijections, found by optimal assignment on the contingency table.
inline double accuracy(const LabelVector& truth, const LabelVector& pred) {
  detail::check_lengths(truth, pred);
  auto table = detail::contingency(truth, pred);
  int kt = static_cast<int>(table.size());
  int kp = static_cast<int>(table[0].size());
  int m = std::max(kt, kp);
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
  for (int t = 0; t < kt; ++t) {
    for (int q = 0; q < kp; ++q) cost[t][q] = -double(table[t][q]);
  }
  std::vector<int> match = detail::hungarian_min_cost(cost);
  long hits = 0;
  for (int t = 0; t < kt; ++t) {
    int q = match[t];
    if (q >= 0 && q < kp) hits += table[t][q];
  }
  return double(hits) / double(truth.labels.size());
}

/// Normalized mutual information with the arithmetic-mean normalizer.
/// Degenerate zero-entropy cases: both partitions single-cluster -> 1,
/// exactly one single-cluster -> 0.
inline double nmi(const LabelVector& truth, const LabelVector& pred) {
  detail::check_lengths(truth, pred);
  auto table = detail::contingency(truth, pred);
  const double n = double(truth.labels.size());
  int kt = static_cast<int>(table.size());
  int kp = static_cast<int>(table[0].size());
  std::vector<double> rt(kt, 0.0), cp(kp, 0.0);
  for (int t = 0; t < kt; ++t) {
    for (int q = 0; q < kp; ++q) {
      rt[t] += double(table[t][q]);
      cp[q] += double(table[t][q]);
    }
  }
  double ht = 0.0, hp = 0.0, mi = 0.0;
  for (int t = 0; t < kt; ++t) {
    if (rt[t] > 0) ht -= rt[t] / n * std::log(rt[t] / n);
  }
  for (int q = 0; q < kp; ++q) {
    if (cp[q] > 0) hp -= cp[q] / n * std::log(cp[q] / n);
  }
  for (int t = 0; t < kt; ++t) {
    for (int q = 0; q < kp; ++q) {
      double c = double(table[t][q]);
      if (c > 0) mi += c / n * std::log(n * c / (rt[t] * cp[q]));
    }
  }
  if (ht == 0.0 && hp == 0.0) return 1.0;
  if (ht == 0.0 || hp == 0.0) return 0.0;
  double value = mi / (0.5 * (ht + hp));
  return std::clamp(value, 0.0, 1.0);
}

/// Purity: each predicted cluster votes for its dominant truth class.
inline double purity(const LabelVector& truth, const LabelVector& pred) {
  detail::check_lengths(truth, pred);
  auto table = detail::contingency(truth, pred);
  int kt = static_cast<int>(table.size());
  int kp = static_cast<int>(table[0].size());
  long total = 0;
  for (int q = 0; q < kp; ++q) {
    long best = 0;
    for (int t = 0; t < kt; ++t) best = std::max(best, table[t][q]);
    total += best;
  }
  return double(total) / double(truth.labels.size());
}

inline MetricReport evaluate(const LabelVector& truth, const LabelVector& pred) {
  return {accuracy(truth, pred), nmi(truth, pred), purity(truth, pred)};
}

}  // namespace dklm
