#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtization/dataset.hpp"

namespace dtz {

/// Direction of the depth -> factor mapping.
///  - as_published: S = exp(x * depth), in (1, 2]
///  - descending:   S = exp(-x * (depth - 1)), in (0.5, 1]
enum class FactorMode { as_published, descending };

std::string_view to_string(FactorMode mode);
FactorMode parse_factor_mode(std::string_view text);

/// ln(2) / nf: the rate at which exp(x * depth) reaches 2 at depth nf.
double exponent(int feature_count);

double gini_impurity(std::span<const std::string> labels);
/// Gini impurity from per-class counts (zero counts allowed).
double gini_from_counts(std::span<const long> counts, long total);
/// Population variance.
double regression_impurity(std::span<const double> targets);

struct SplitChoice {
  Eigen::Index feature = 0;
  std::string feature_name;
  /// Rows with value < split_point go left.
  double split_point = 0.0;
  double impurity_decrease = 0.0;
};

/// Exhaustive CART split search over every feature and every midpoint between
/// consecutive distinct values. Minimises the size-weighted child impurity
/// (gini for classification, variance for regression); ties resolve to the
/// lower feature index, then the smaller threshold. Returns nullopt for pure
/// nodes or when no feature has two distinct values.
std::optional<SplitChoice> best_split(const Dataset& node);

/// One internal node visited while building the importance tree.
struct TreeNode {
  int parent = -1;
  int depth = 1;
  Eigen::Index feature = 0;
  double split_point = 0.0;
  Eigen::Index rows = 0;
};

struct ScalingFactorTable {
  double exponent = 0.0;
  int nf_total = 0;
  FactorMode mode = FactorMode::as_published;
  std::vector<std::string> feature_names;
  /// Shallowest depth at which each feature was chosen; nullopt if never.
  std::vector<std::optional<int>> first_depth;
  Eigen::VectorXd factors;
  /// Split nodes in depth-first visit order.
  std::vector<TreeNode> nodes;

  std::optional<Eigen::Index> find(std::string_view name) const;
};

/// Depth-to-factor mapping shared by calculate_sf and file loading.
double factor_for_depth(double exponent, int depth, FactorMode mode);

/// Grows an unpruned tree depth-first from depth 1, removing each split
/// feature from both children, and records for every feature the shallowest
/// depth at which it was chosen. A node stops when depth > nf_total, it has
/// fewer than two rows, its target is pure, or no split exists.
ScalingFactorTable calculate_sf(const Dataset& data, double exponent, FactorMode mode);

}  // namespace dtz
