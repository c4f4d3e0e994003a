#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dtization/dataset.hpp"
#include "dtization/scalers.hpp"

namespace dtz {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ReportFormat { text, rows };

struct BenchConfig {
  std::filesystem::path data;
  std::string target;
  TaskKind task = TaskKind::classification;
  std::vector<ScalerMethod> scalers = all_scaler_methods();
  /// Each dtization entry is run once per mode listed here.
  std::vector<FactorMode> modes = {FactorMode::as_published};
  int k = 3;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::text;
};

/// Throws ArgumentError when the config breaks an invariant.
void validate(const BenchConfig& config);

struct BenchRow {
  std::string dataset;
  std::string scaler;
  std::string model;
  std::string metric;
  double value = 0.0;
};

struct BenchFailure {
  std::string scaler;
  std::string message;
};

struct BenchReport {
  std::string dataset;
  TaskKind task = TaskKind::classification;
  std::string model;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  int k = 0;
  std::vector<FactorMode> modes;
  Eigen::Index train_rows = 0;
  Eigen::Index test_rows = 0;
  Eigen::Index features = 0;
  std::string timestamp;
  /// Scaler labels in config order; failed ones included.
  std::vector<std::string> scalers;
  std::vector<BenchRow> rows;
  std::vector<BenchFailure> failures;

  std::optional<double> value(const std::string& scaler, const std::string& metric) const;
};

/// Scaler label used in reports: the method name, or "dtization/<mode>".
std::string scaler_label(ScalerMethod method, FactorMode mode);

/// Fits every scaler on the training split only, transforms both splits and
/// scores KNN (classification) or OLS (regression) on the test split.
BenchReport run_bench(const BenchConfig& config);

/// Same protocol on an already loaded dataset.
BenchReport run_bench(const Dataset& data, const std::string& dataset_name, const BenchConfig& config);

/// Table layout with 4 decimal places. The timestamp sits on its own line
/// beginning "# timestamp:" so the rest of the report is reproducible.
std::string render_text(const BenchReport& report);
/// "dataset,scaler,model,metric,value" rows with round-trip precision,
/// preceded by "# key=value" metadata lines.
std::string render_rows(const BenchReport& report);

}  // namespace dtz
