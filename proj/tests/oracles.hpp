#pragma once

// Test-only reference implementations and random data generators. Nothing here
// calls into the library's search or statistics code paths.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dtization/dataset.hpp"

namespace dtz::testing {

/// Sorts a copy and interpolates at p*(n-1) directly.
inline double brute_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v[lo];
  const double frac = h - static_cast<double>(lo);
  if (v[lo] == v[lo + 1]) return v[lo];
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

inline double oracle_gini(const std::vector<std::string>& labels) {
  std::map<std::string, long> tally;
  for (const auto& l : labels) ++tally[l];
  double sum_sq = 0.0;
  for (const auto& [label, c] : tally) {
    const double p = static_cast<double>(c) / static_cast<double>(labels.size());
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct OracleSplit {
  Eigen::Index feature;
  double threshold;
  double decrease;
};

/// Enumerates every (feature, midpoint) pair, partitions the labels by
/// value < midpoint and scores the weighted gini of the two halves.
inline std::optional<OracleSplit> exhaustive_split(const Eigen::MatrixXd& x, const std::vector<std::string>& y) {
  const auto n = static_cast<double>(y.size());
  if (y.size() < 2) return std::nullopt;
  if (std::all_of(y.begin(), y.end(), [&](const auto& l) { return l == y.front(); })) return std::nullopt;
  const double parent = oracle_gini(y);
  std::optional<OracleSplit> best;
  double best_weighted = INFINITY;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> values(x.col(f).data(), x.col(f).data() + x.rows());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      double t = (values[i] + values[i + 1]) / 2.0;
      if (!(values[i] < t)) t = values[i + 1];
      std::vector<std::string> left;
      std::vector<std::string> right;
      for (Eigen::Index r = 0; r < x.rows(); ++r) (x(r, f) < t ? left : right).push_back(y[r]);
      const double weighted = (static_cast<double>(left.size()) / n) * oracle_gini(left) +
                              (static_cast<double>(right.size()) / n) * oracle_gini(right);
      if (weighted < best_weighted) {
        best_weighted = weighted;
        best = OracleSplit{f, t, std::max(0.0, parent - weighted)};
      }
    }
  }
  return best;
}

inline std::vector<std::string> feature_names(Eigen::Index d) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

/// Small-integer features (lots of ties) and labels from a K-letter alphabet.
inline Dataset random_classification(std::mt19937_64& rng, int n, int d, int classes, int value_range = 6) {
  std::uniform_int_distribution<int> value(0, value_range - 1);
  std::uniform_int_distribution<int> label(0, classes - 1);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = value(rng);
  std::vector<std::string> y;
  for (int i = 0; i < n; ++i) y.push_back(std::string(1, static_cast<char>('a' + label(rng))));
  return {feature_names(d), std::move(x), "y", std::move(y)};
}

/// Continuous features with labels that depend on the first few features, so
/// the tree has real structure to find.
inline Dataset structured_classification(std::mt19937_64& rng, int n, int d, int classes) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = gauss(rng) * (1.0 + j);
  std::vector<std::string> y;
  for (int i = 0; i < n; ++i) {
    double score = x(i, 0) + 0.5 * (d > 1 ? x(i, 1) : 0.0) + 0.3 * gauss(rng);
    int c = static_cast<int>(std::floor((std::tanh(score) + 1.0) / 2.0 * classes));
    c = std::clamp(c, 0, classes - 1);
    y.push_back("c" + std::to_string(c));
  }
  return {feature_names(d), std::move(x), "y", std::move(y)};
}

inline Dataset random_regression(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = gauss(rng) * 3.0 + j;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = 2.0 * x(i, 0) - (d > 1 ? x(i, 1) : 0.0) + gauss(rng);
  return {feature_names(d), std::move(x), "y", std::move(y)};
}

}  // namespace dtz::testing
