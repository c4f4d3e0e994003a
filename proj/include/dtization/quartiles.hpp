#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dtization/error.hpp"

namespace dtz {

template <typename Scalar>
struct QuartileSummary {
  Scalar q1{};
  Scalar q3{};
  Scalar iqr() const { return q3 - q1; }
};

/// Linear interpolation at rank p*(n-1) of an already sorted, non-empty range.
template <typename Scalar>
Scalar interpolate_sorted(const std::vector<Scalar>& sorted, Scalar p) {
  const Scalar rank = p * static_cast<Scalar>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const Scalar frac = rank - static_cast<Scalar>(lo);
  // Equal neighbours short-circuit so constant data returns the value itself.
  if (sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// First and third quartile with linear interpolation between order statistics
/// (positions 0.25*(n-1) and 0.75*(n-1), the "type 7" convention).
template <typename Derived>
QuartileSummary<typename Derived::Scalar> quartiles(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) throw ArgumentError("quartiles: empty input");
  std::vector<Scalar> sorted;
  sorted.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) sorted.push_back(values.derived()(i));
  std::sort(sorted.begin(), sorted.end());
  return {interpolate_sorted(sorted, Scalar(0.25)), interpolate_sorted(sorted, Scalar(0.75))};
}

}  // namespace dtz
