#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dtization/dataset.hpp"
#include "dtization/quartiles.hpp"
#include "dtization/tree_importance.hpp"

namespace dtz {

enum class ScalerMethod { dtization, minmax, standard, log, robust };

std::string_view to_string(ScalerMethod method);
ScalerMethod parse_scaler_method(std::string_view text);
const std::vector<ScalerMethod>& all_scaler_methods();

// Column kernels. Each maps a degenerate (zero-width) column to zeros.

template <typename Derived, typename Scalar = typename Derived::Scalar>
auto minmax_scale(const Eigen::ArrayBase<Derived>& x, Scalar lo, Scalar hi) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const Scalar range = hi - lo;
  if (range == Scalar(0)) return Array(Array::Zero(x.size()));
  return Array((x - lo) / range);
}

template <typename Derived, typename Scalar = typename Derived::Scalar>
auto standard_scale(const Eigen::ArrayBase<Derived>& x, Scalar mean, Scalar stddev) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  if (stddev == Scalar(0)) return Array(Array::Zero(x.size()));
  return Array((x - mean) / stddev);
}

template <typename Derived, typename Scalar = typename Derived::Scalar>
auto log_scale(const Eigen::ArrayBase<Derived>& x, Scalar shift) {
  return Eigen::Array<Scalar, Eigen::Dynamic, 1>((x + shift).log());
}

/// (x - Q1) / (Q3 - Q1). Note: centred on Q1, not the median.
template <typename Derived, typename Scalar = typename Derived::Scalar>
auto robust_scale(const Eigen::ArrayBase<Derived>& x, const QuartileSummary<Scalar>& q) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const Scalar iqr = q.iqr();
  if (iqr == Scalar(0)) return Array(Array::Zero(x.size()));
  return Array((x - q.q1) / iqr);
}

/// factor * robust_scale(x, q).
template <typename Derived, typename Scalar = typename Derived::Scalar>
auto dtization_scale(const Eigen::ArrayBase<Derived>& x, const QuartileSummary<Scalar>& q, Scalar factor) {
  return Eigen::Array<Scalar, Eigen::Dynamic, 1>(factor * robust_scale(x, q));
}

struct MinMaxParams {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

struct StandardParams {
  Eigen::VectorXd mean;
  /// Population standard deviation.
  Eigen::VectorXd stddev;
};

struct LogParams {
  /// max(0, 1 - column minimum), so every log argument is at least 1 on the fit data.
  Eigen::VectorXd shift;
};

struct RobustParams {
  Eigen::VectorXd q1;
  Eigen::VectorXd q3;
  QuartileSummary<double> quartiles(Eigen::Index j) const { return {q1(j), q3(j)}; }
};

struct DtizationParams {
  RobustParams quartiles;
  ScalingFactorTable factors;
};

using ScalerParams = std::variant<DtizationParams, MinMaxParams, StandardParams, LogParams, RobustParams>;

struct FittedScaler {
  ScalerMethod method = ScalerMethod::robust;
  FactorMode mode = FactorMode::as_published;
  std::vector<std::string> feature_names;
  /// Target column name of the fit data (empty if unlabeled).
  std::string target_name;
  ScalerParams params;
};

FittedScaler fit(const Dataset& data, ScalerMethod method, FactorMode mode = FactorMode::as_published);

/// Returns a new dataset with every fitted feature scaled. Columns the scaler
/// does not know are passed through unchanged (with a warning).
Dataset transform(const FittedScaler& scaler, const Dataset& data);

/// Scaled copy of a single fitted feature column.
Eigen::VectorXd transform_column(const FittedScaler& scaler, Eigen::Index fitted_index,
                                 const Eigen::Ref<const Eigen::VectorXd>& column);

void save_scaler(const FittedScaler& scaler, const std::filesystem::path& path);
FittedScaler load_scaler(const std::filesystem::path& path);

/// In-memory forms of the scaler file.
std::string serialize_scaler(const FittedScaler& scaler);
FittedScaler deserialize_scaler(std::string_view text);

/// Human-readable per-feature parameter listing (used by the CLI).
std::string describe(const FittedScaler& scaler);

}  // namespace dtz
