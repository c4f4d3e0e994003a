#include "dtization/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "csv.hpp"
#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"

namespace dtz {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification: return "classification";
    case TaskKind::regression: return "regression";
    case TaskKind::unlabeled: return "unlabeled";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "classification") return TaskKind::classification;
  if (text == "regression") return TaskKind::regression;
  if (text == "unlabeled") return TaskKind::unlabeled;
  throw ArgumentError(fmt::format("unknown task kind '{}'", text));
}

Dataset::Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features)
    : names_(std::move(feature_names)), features_(std::move(features)) {
  validate();
}

Dataset::Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features,
                 std::string target_name, std::vector<std::string> labels)
    : names_(std::move(feature_names)),
      features_(std::move(features)),
      kind_(TaskKind::classification),
      target_name_(std::move(target_name)),
      labels_(std::move(labels)) {
  for (auto& label : labels_) label = std::string(csv::trim(label));
  validate();
}

Dataset::Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features,
                 std::string target_name, Eigen::VectorXd targets)
    : names_(std::move(feature_names)),
      features_(std::move(features)),
      kind_(TaskKind::regression),
      target_name_(std::move(target_name)),
      targets_(std::move(targets)) {
  validate();
}

void Dataset::validate() const {
  if (features_.rows() < 1) throw DataError("dataset has no rows");
  if (static_cast<Eigen::Index>(names_.size()) != features_.cols())
    throw ArgumentError(fmt::format("dataset: {} feature names for {} columns", names_.size(),
                                    features_.cols()));
  std::unordered_set<std::string> seen;
  for (const auto& name : names_)
    if (!seen.insert(name).second) throw DataError(fmt::format("duplicate feature name '{}'", name));
  if (!features_.allFinite()) throw DataError("dataset contains non-finite feature values");
  if (kind_ == TaskKind::classification &&
      static_cast<Eigen::Index>(labels_.size()) != features_.rows())
    throw ArgumentError("dataset: label count does not match row count");
  if (kind_ == TaskKind::regression) {
    if (targets_.size() != features_.rows())
      throw ArgumentError("dataset: target count does not match row count");
    if (!targets_.allFinite()) throw DataError("dataset contains non-finite targets");
  }
}

std::optional<Eigen::Index> Dataset::find_feature(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - names_.begin());
}

const std::vector<std::string>& Dataset::labels() const {
  if (kind_ != TaskKind::classification) throw ArgumentError("dataset has no class labels");
  return labels_;
}

const Eigen::VectorXd& Dataset::targets() const {
  if (kind_ != TaskKind::regression) throw ArgumentError("dataset has no regression target");
  return targets_;
}

Dataset Dataset::select_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), cols());
  for (Eigen::Index i = 0; i < sub.rows(); ++i) sub.row(i) = features_.row(rows[i]);
  switch (kind_) {
    case TaskKind::classification: {
      std::vector<std::string> labels;
      labels.reserve(rows.size());
      for (auto r : rows) labels.push_back(labels_[r]);
      return {names_, std::move(sub), target_name_, std::move(labels)};
    }
    case TaskKind::regression: {
      Eigen::VectorXd t(sub.rows());
      for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = targets_(rows[i]);
      return {names_, std::move(sub), target_name_, std::move(t)};
    }
    case TaskKind::unlabeled: break;
  }
  return {names_, std::move(sub)};
}

Dataset Dataset::with_features(Eigen::MatrixXd features) const {
  if (features.rows() != rows() || features.cols() != cols())
    throw ArgumentError("with_features: shape mismatch");
  switch (kind_) {
    case TaskKind::classification: return {names_, std::move(features), target_name_, labels_};
    case TaskKind::regression: return {names_, std::move(features), target_name_, targets_};
    case TaskKind::unlabeled: break;
  }
  return {names_, std::move(features)};
}

namespace {

bool is_missing_token(std::string_view cell) {
  static const std::set<std::string_view> tokens = {"", "NA", "N/A", "NaN", "nan", "null", "NULL", "?"};
  return tokens.contains(csv::trim(cell));
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::optional<std::string> target_name,
                 TaskKind kind, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  if (kind == TaskKind::unlabeled && target_name)
    throw ArgumentError("a target column was named for an unlabeled load");
  if (kind != TaskKind::unlabeled && !target_name)
    throw ArgumentError(fmt::format("{} load requires a target column", to_string(kind)));

  auto header = csv::read_record(in);
  if (!header) throw DataError(fmt::format("'{}' is empty", path.string()));
  if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) header->front().erase(0, 3);
  for (auto& h : *header) h = std::string(csv::trim(h));
  const std::size_t width = header->size();

  std::optional<std::size_t> target_col;
  if (target_name) {
    const auto it = std::find(header->begin(), header->end(), *target_name);
    if (it == header->end())
      throw DataError(fmt::format("target column '{}' not found in '{}'", *target_name, path.string()));
    target_col = static_cast<std::size_t>(it - header->begin());
  }

  std::vector<csv::Record> records;
  std::size_t line = 1;
  while (auto rec = csv::read_record(in)) {
    ++line;
    if (rec->size() == 1 && csv::trim(rec->front()).empty()) continue;
    if (rec->size() != width)
      throw DataError(fmt::format("'{}' record {} has {} fields, header has {}", path.string(), line,
                                  rec->size(), width));
    records.push_back(std::move(*rec));
  }

  // A feature column is kept when it has at least one present cell and every
  // present cell parses as a number.
  std::vector<std::size_t> kept;
  LoadReport local;
  for (std::size_t c = 0; c < width; ++c) {
    if (target_col && c == *target_col) continue;
    bool any_present = false;
    bool numeric = true;
    for (const auto& rec : records) {
      if (is_missing_token(rec[c])) continue;
      any_present = true;
      if (!csv::parse_number(rec[c])) {
        numeric = false;
        break;
      }
    }
    if (numeric && any_present) {
      kept.push_back(c);
    } else {
      local.dropped_columns.push_back((*header)[c]);
    }
  }

  if (kind == TaskKind::regression) {
    for (const auto& rec : records) {
      const auto& cell = rec[*target_col];
      if (!is_missing_token(cell) && !csv::parse_number(cell))
        throw TaskKindMismatch(fmt::format("regression target '{}' is not numeric (value '{}')",
                                           *target_name, cell));
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::vector<double> targets;
  for (const auto& rec : records) {
    std::vector<double> values;
    values.reserve(kept.size());
    bool ok = true;
    for (auto c : kept) {
      const auto v = is_missing_token(rec[c]) ? std::nullopt : csv::parse_number(rec[c]);
      if (!v || !std::isfinite(*v)) {
        ok = false;
        break;
      }
      values.push_back(*v);
    }
    if (ok && target_col) {
      const auto& cell = rec[*target_col];
      if (is_missing_token(cell)) {
        ok = false;
      } else if (kind == TaskKind::regression) {
        const auto v = csv::parse_number(cell);
        ok = v && std::isfinite(*v);
        if (ok) targets.push_back(*v);
      } else {
        labels.emplace_back(csv::trim(cell));
      }
    }
    if (!ok) {
      ++local.dropped_rows;
      continue;
    }
    rows.push_back(std::move(values));
  }

  if (!local.dropped_columns.empty())
    warn(fmt::format("dropped {} non-numeric column(s): {}", local.dropped_columns.size(),
                     fmt::join(local.dropped_columns, ", ")));
  if (local.dropped_rows > 0)
    warn(fmt::format("dropped {} row(s) with missing or unparseable values", local.dropped_rows));
  if (report) *report = local;

  if (rows.empty()) throw DataError(fmt::format("'{}' has no usable rows after cleaning", path.string()));
  if (kept.empty()) throw DataError(fmt::format("'{}' has no numeric feature columns", path.string()));

  Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    for (Eigen::Index j = 0; j < features.cols(); ++j) features(i, j) = rows[i][j];
  std::vector<std::string> names;
  for (auto c : kept) names.push_back((*header)[c]);

  switch (kind) {
    case TaskKind::classification:
      return {std::move(names), std::move(features), *target_name, std::move(labels)};
    case TaskKind::regression:
      return {std::move(names), std::move(features), *target_name,
              Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size())))};
    case TaskKind::unlabeled: break;
  }
  return {std::move(names), std::move(features)};
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  auto header = csv::read_record(in);
  if (!header) throw DataError(fmt::format("'{}' is empty", path.string()));
  if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) header->front().erase(0, 3);
  for (auto& h : *header) h = std::string(csv::trim(h));
  return *header;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  std::string line;
  for (std::size_t j = 0; j < data.feature_names().size(); ++j) {
    if (j) line += ',';
    line += csv::escape(data.feature_names()[j]);
  }
  if (data.has_target()) line += "," + csv::escape(data.target_name());
  out << line << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j) line += ',';
      line += csv::format_roundtrip(data.features()(i, j));
    }
    if (data.task_kind() == TaskKind::classification) line += "," + csv::escape(data.labels()[i]);
    if (data.task_kind() == TaskKind::regression) line += "," + csv::format_roundtrip(data.targets()(i));
    out << line << '\n';
  }
  if (!out) throw DataError(fmt::format("error while writing '{}'", path.string()));
}

bool looks_continuous(std::span<const std::string> labels) {
  bool any_fractional = false;
  std::set<double> distinct;
  for (const auto& label : labels) {
    const auto v = csv::parse_number(label);
    if (!v) return false;
    if (std::isfinite(*v) && *v != std::floor(*v)) any_fractional = true;
    distinct.insert(*v);
  }
  // Integer-valued targets with many distinct values (counts, scores) are
  // regression targets too; class ids rarely exceed a couple of dozen.
  const auto n = distinct.size();
  return any_fractional || (n > 20 && 4 * n > labels.size());
}

namespace {

// Unbiased draw in [0, bound) from a 64-bit engine; avoids the
// implementation-defined std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

void shuffle(std::vector<Eigen::Index>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = bounded(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

SplitDataset train_test_split(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError(fmt::format("test fraction {} is outside (0, 1)", fraction));
  if (!data.has_target()) throw ArgumentError("train_test_split requires a labelled dataset");

  const auto n = static_cast<std::size_t>(data.rows());
  const auto test_total = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (test_total == 0 || test_total >= n)
    throw ArgumentError(fmt::format("test fraction {} leaves an empty split for {} rows", fraction, n));

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> test_rows;
  std::vector<Eigen::Index> train_rows;

  if (data.task_kind() == TaskKind::classification) {
    std::map<std::string, std::vector<Eigen::Index>> strata;
    for (std::size_t i = 0; i < n; ++i) strata[data.labels()[i]].push_back(static_cast<Eigen::Index>(i));

    struct Stratum {
      std::vector<Eigen::Index>* rows;
      std::size_t take;
      double remainder;
    };
    std::vector<Stratum> eligible;
    std::size_t eligible_rows = 0;
    for (auto& [label, rows] : strata) {
      if (rows.size() < 2) {
        warn(fmt::format("class '{}' has a single member; it stays in the training split", label));
        train_rows.insert(train_rows.end(), rows.begin(), rows.end());
        continue;
      }
      eligible_rows += rows.size();
      eligible.push_back({&rows, 0, 0.0});
    }
    // Largest-remainder apportionment of the test rows across classes.
    const auto target = std::min(test_total, eligible_rows);
    std::size_t assigned = 0;
    for (auto& s : eligible) {
      const double exact = fraction * static_cast<double>(s.rows->size());
      s.take = static_cast<std::size_t>(std::floor(exact));
      s.remainder = exact - static_cast<double>(s.take);
      assigned += s.take;
    }
    std::vector<std::size_t> order(eligible.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return eligible[a].remainder > eligible[b].remainder;
    });
    for (std::size_t k = 0; assigned < target && k < order.size(); ++k) {
      auto& s = eligible[order[k]];
      if (s.take + 1 < s.rows->size()) {
        ++s.take;
        ++assigned;
      }
    }
    for (auto& s : eligible) {
      shuffle(*s.rows, rng);
      test_rows.insert(test_rows.end(), s.rows->begin(), s.rows->begin() + static_cast<std::ptrdiff_t>(s.take));
      train_rows.insert(train_rows.end(), s.rows->begin() + static_cast<std::ptrdiff_t>(s.take), s.rows->end());
    }
  } else {
    std::vector<Eigen::Index> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Eigen::Index>(i);
    shuffle(all, rng);
    test_rows.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(test_total));
    train_rows.assign(all.begin() + static_cast<std::ptrdiff_t>(test_total), all.end());
  }

  if (test_rows.empty() || train_rows.empty())
    throw ArgumentError(fmt::format("test fraction {} leaves an empty split", fraction));
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  auto train = data.select_rows(train_rows);
  auto test = data.select_rows(test_rows);
  return {std::move(train), std::move(test), seed, fraction, std::move(train_rows), std::move(test_rows)};
}

}  // namespace dtz
