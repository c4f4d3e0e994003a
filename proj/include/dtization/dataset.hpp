#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dtz {

enum class TaskKind { classification, regression, unlabeled };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view text);

/// Columnar numeric table with an optional target.
///
/// Features are held as an n x d column-major matrix so each feature column is
/// contiguous. Classification targets are text labels (trimmed), regression
/// targets are reals. The object is immutable once built.
class Dataset {
 public:
  /// Unlabeled dataset.
  Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features);
  /// Classification dataset.
  Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features,
          std::string target_name, std::vector<std::string> labels);
  /// Regression dataset.
  Dataset(std::vector<std::string> feature_names, Eigen::MatrixXd features,
          std::string target_name, Eigen::VectorXd targets);

  Eigen::Index rows() const { return features_.rows(); }
  Eigen::Index cols() const { return features_.cols(); }

  TaskKind task_kind() const { return kind_; }
  bool has_target() const { return kind_ != TaskKind::unlabeled; }

  const std::vector<std::string>& feature_names() const { return names_; }
  const Eigen::MatrixXd& features() const { return features_; }
  auto column(Eigen::Index j) const { return features_.col(j); }

  std::optional<Eigen::Index> find_feature(std::string_view name) const;

  const std::string& target_name() const { return target_name_; }
  /// Classification labels; throws ArgumentError for other task kinds.
  const std::vector<std::string>& labels() const;
  /// Regression targets; throws ArgumentError for other task kinds.
  const Eigen::VectorXd& targets() const;

  /// Same columns and target, rows taken in the given order.
  Dataset select_rows(std::span<const Eigen::Index> rows) const;
  /// Replace the feature block (same names), keeping the target.
  Dataset with_features(Eigen::MatrixXd features) const;

 private:
  void validate() const;

  std::vector<std::string> names_;
  Eigen::MatrixXd features_;
  TaskKind kind_ = TaskKind::unlabeled;
  std::string target_name_;
  std::vector<std::string> labels_;
  Eigen::VectorXd targets_;
};

/// What load_csv discarded while cleaning.
struct LoadReport {
  std::vector<std::string> dropped_columns;
  std::size_t dropped_rows = 0;
};

/// Reads an RFC-4180 CSV with a header row.
///
/// Columns whose every present cell parses as a finite number are kept as
/// features; other columns are dropped. Rows with a missing or non-finite value
/// in a kept column (or a missing target) are dropped. Both are reported via
/// warn() and `report`.
Dataset load_csv(const std::filesystem::path& path, std::optional<std::string> target_name,
                 TaskKind kind, LoadReport* report = nullptr);

/// Trimmed header cells of a CSV file.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

/// Writes features (and the target, last) with shortest round-trip formatting.
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// True when every label is numeric and either one is not an integer or there
/// are more than 20 distinct values making up over a quarter of the rows, i.e.
/// the column looks like a regression target.
bool looks_continuous(std::span<const std::string> labels);

struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
};

/// Seeded shuffle split; classification targets are stratified per class.
/// `fraction` is the test share.
SplitDataset train_test_split(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace dtz
