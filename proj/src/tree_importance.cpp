#include "dtization/tree_importance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "dtization/error.hpp"

namespace dtz {

std::string_view to_string(FactorMode mode) {
  return mode == FactorMode::as_published ? "as-published" : "descending";
}

FactorMode parse_factor_mode(std::string_view text) {
  if (text == "as-published") return FactorMode::as_published;
  if (text == "descending") return FactorMode::descending;
  throw ArgumentError(fmt::format("unknown factor mode '{}' (expected as-published or descending)", text));
}

double exponent(int feature_count) {
  if (feature_count < 1) throw ArgumentError("exponent: feature count must be at least 1");
  return std::numbers::ln2 / static_cast<double>(feature_count);
}

double gini_from_counts(std::span<const long> counts, long total) {
  double sum_sq = 0.0;
  for (const long c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double gini_impurity(std::span<const std::string> labels) {
  if (labels.empty()) throw ArgumentError("gini_impurity: empty label list");
  std::map<std::string_view, long> tally;
  for (const auto& l : labels) ++tally[l];
  std::vector<long> counts;
  for (const auto& [label, c] : tally) counts.push_back(c);
  return gini_from_counts(counts, static_cast<long>(labels.size()));
}

double regression_impurity(std::span<const double> targets) {
  if (targets.empty()) throw ArgumentError("regression_impurity: empty target list");
  const auto n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double ss = 0.0;
  for (const double t : targets) ss += (t - mean) * (t - mean);
  return ss / n;
}

double factor_for_depth(double exponent, int depth, FactorMode mode) {
  if (mode == FactorMode::as_published) return std::exp(exponent * depth);
  return std::exp(-exponent * (depth - 1));
}

std::optional<Eigen::Index> ScalingFactorTable::find(std::string_view name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - feature_names.begin());
}

namespace {

// Target in the form the split search works on: class codes or reals.
struct Target {
  bool classification = true;
  std::vector<int> codes;
  int classes = 0;
  std::vector<double> values;
};

Target encode_target(const Dataset& data) {
  Target t;
  if (data.task_kind() == TaskKind::classification) {
    std::map<std::string, int> index;
    for (const auto& l : data.labels()) index.emplace(l, 0);
    int next = 0;
    for (auto& [label, code] : index) code = next++;
    t.classes = next;
    t.codes.reserve(data.labels().size());
    for (const auto& l : data.labels()) t.codes.push_back(index.at(l));
  } else if (data.task_kind() == TaskKind::regression) {
    t.classification = false;
    t.values.assign(data.targets().data(), data.targets().data() + data.targets().size());
  } else {
    throw ArgumentError("a target is required to grow the importance tree");
  }
  return t;
}

double midpoint(double lo, double hi) {
  double mid = (lo + hi) / 2.0;
  if (!std::isfinite(mid)) mid = lo / 2.0 + hi / 2.0;
  // Adjacent doubles: the rounded midpoint must still put `lo` on the left.
  if (!(lo < mid)) mid = hi;
  return mid;
}

struct NodeSearch {
  const Eigen::MatrixXd& x;
  const Target& target;

  bool is_pure(std::span<const Eigen::Index> rows) const {
    if (target.classification) {
      const int first = target.codes[rows[0]];
      return std::all_of(rows.begin(), rows.end(), [&](auto r) { return target.codes[r] == first; });
    }
    const double first = target.values[rows[0]];
    return std::all_of(rows.begin(), rows.end(), [&](auto r) { return target.values[r] == first; });
  }

  double parent_impurity(std::span<const Eigen::Index> rows) const {
    if (target.classification) {
      std::vector<long> counts(target.classes, 0);
      for (auto r : rows) ++counts[target.codes[r]];
      return gini_from_counts(counts, static_cast<long>(rows.size()));
    }
    std::vector<double> v;
    v.reserve(rows.size());
    for (auto r : rows) v.push_back(target.values[r]);
    return regression_impurity(v);
  }

  std::optional<SplitChoice> search(std::span<const Eigen::Index> rows,
                                    std::span<const Eigen::Index> features) const {
    if (rows.size() < 2) return std::nullopt;
    if (is_pure(rows)) return std::nullopt;

    const auto m = static_cast<long>(rows.size());
    const double parent = parent_impurity(rows);
    double best_weighted = std::numeric_limits<double>::infinity();
    std::optional<SplitChoice> best;

    std::vector<Eigen::Index> order(rows.begin(), rows.end());
    std::vector<long> left_counts(target.classes);
    std::vector<long> total_counts(target.classes);
    std::vector<long> right_counts(target.classes);
    if (target.classification)
      for (auto r : rows) ++total_counts[target.codes[r]];
    double node_mean = 0.0;
    if (!target.classification) {
      for (auto r : rows) node_mean += target.values[r];
      node_mean /= static_cast<double>(m);
    }
    double total_sum = 0.0;
    double total_sq = 0.0;
    if (!target.classification) {
      for (auto r : rows) {
        const double c = target.values[r] - node_mean;
        total_sum += c;
        total_sq += c * c;
      }
    }

    for (const auto f : features) {
      const auto col = x.col(f);
      std::copy(rows.begin(), rows.end(), order.begin());
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return col(a) < col(b); });
      if (col(order.front()) == col(order.back())) continue;

      std::fill(left_counts.begin(), left_counts.end(), 0L);
      double left_sum = 0.0;
      double left_sq = 0.0;
      for (long i = 1; i < m; ++i) {
        const auto prev = order[i - 1];
        if (target.classification) {
          ++left_counts[target.codes[prev]];
        } else {
          const double c = target.values[prev] - node_mean;
          left_sum += c;
          left_sq += c * c;
        }
        const double lo = col(prev);
        const double hi = col(order[i]);
        if (lo == hi) continue;

        const long nl = i;
        const long nr = m - i;
        double left_imp = 0.0;
        double right_imp = 0.0;
        if (target.classification) {
          for (int k = 0; k < target.classes; ++k) right_counts[k] = total_counts[k] - left_counts[k];
          left_imp = gini_from_counts(left_counts, nl);
          right_imp = gini_from_counts(right_counts, nr);
        } else {
          const double ml = left_sum / static_cast<double>(nl);
          const double mr = (total_sum - left_sum) / static_cast<double>(nr);
          left_imp = std::max(0.0, left_sq / static_cast<double>(nl) - ml * ml);
          right_imp = std::max(0.0, (total_sq - left_sq) / static_cast<double>(nr) - mr * mr);
        }
        const double weighted = (static_cast<double>(nl) / static_cast<double>(m)) * left_imp +
                                (static_cast<double>(nr) / static_cast<double>(m)) * right_imp;
        if (weighted < best_weighted) {
          best_weighted = weighted;
          best = SplitChoice{f, {}, midpoint(lo, hi), std::max(0.0, parent - weighted)};
        }
      }
    }
    return best;
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, ScalingFactorTable& table)
      : search_{data.features(), target_}, table_(table) {
    target_ = encode_target(data);
  }

  void grow(std::vector<Eigen::Index> rows, std::vector<Eigen::Index> features, int depth, int parent) {
    if (depth > table_.nf_total || rows.size() < 2 || features.empty()) return;
    const auto split = search_.search(rows, features);
    if (!split) return;

    const auto f = split->feature;
    auto& recorded = table_.first_depth[f];
    if (!recorded || depth < *recorded) recorded = depth;
    const int id = static_cast<int>(table_.nodes.size());
    table_.nodes.push_back({parent, depth, f, split->split_point, static_cast<Eigen::Index>(rows.size())});

    std::vector<Eigen::Index> left;
    std::vector<Eigen::Index> right;
    const auto col = search_.x.col(f);
    for (auto r : rows) (col(r) < split->split_point ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    std::erase(features, f);

    grow(std::move(left), features, depth + 1, id);
    grow(std::move(right), std::move(features), depth + 1, id);
  }

 private:
  Target target_;
  NodeSearch search_;
  ScalingFactorTable& table_;
};

}  // namespace

std::optional<SplitChoice> best_split(const Dataset& node) {
  if (node.rows() < 2) throw ArgumentError("best_split: a node needs at least two rows");
  const auto target = encode_target(node);
  NodeSearch search{node.features(), target};
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(node.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::vector<Eigen::Index> features(static_cast<std::size_t>(node.cols()));
  std::iota(features.begin(), features.end(), Eigen::Index{0});
  auto split = search.search(rows, features);
  if (split) split->feature_name = node.feature_names()[split->feature];
  return split;
}

ScalingFactorTable calculate_sf(const Dataset& data, double exponent, FactorMode mode) {
  if (!(exponent > 0.0) || !std::isfinite(exponent))
    throw ArgumentError(fmt::format("calculate_sf: exponent must be positive, got {}", exponent));
  if (data.cols() < 1) throw DataError("calculate_sf: dataset has no features");

  ScalingFactorTable table;
  table.exponent = exponent;
  table.nf_total = static_cast<int>(data.cols());
  table.mode = mode;
  table.feature_names = data.feature_names();
  table.first_depth.assign(static_cast<std::size_t>(data.cols()), std::nullopt);

  std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::vector<Eigen::Index> features(static_cast<std::size_t>(data.cols()));
  std::iota(features.begin(), features.end(), Eigen::Index{0});
  TreeBuilder(data, table).grow(std::move(rows), std::move(features), 1, -1);

  table.factors = Eigen::VectorXd::Ones(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j)
    if (const auto d = table.first_depth[j]) table.factors(j) = factor_for_depth(exponent, *d, mode);
  return table;
}

}  // namespace dtz
