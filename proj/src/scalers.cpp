#include "dtization/scalers.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"

namespace dtz {

std::string_view to_string(ScalerMethod method) {
  switch (method) {
    case ScalerMethod::dtization: return "dtization";
    case ScalerMethod::minmax: return "minmax";
    case ScalerMethod::standard: return "standard";
    case ScalerMethod::log: return "log";
    case ScalerMethod::robust: return "robust";
  }
  return "unknown";
}

const std::vector<ScalerMethod>& all_scaler_methods() {
  static const std::vector<ScalerMethod> methods = {ScalerMethod::minmax, ScalerMethod::standard,
                                                    ScalerMethod::log, ScalerMethod::robust,
                                                    ScalerMethod::dtization};
  return methods;
}

ScalerMethod parse_scaler_method(std::string_view text) {
  for (auto m : all_scaler_methods())
    if (to_string(m) == text) return m;
  throw ArgumentError(
      fmt::format("unknown method '{}' (valid: minmax, standard, log, robust, dtization)", text));
}

namespace {

RobustParams fit_quartiles(const Eigen::MatrixXd& x) {
  RobustParams p{Eigen::VectorXd(x.cols()), Eigen::VectorXd(x.cols())};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto q = quartiles(x.col(j));
    p.q1(j) = q.q1;
    p.q3(j) = q.q3;
  }
  return p;
}

}  // namespace

FittedScaler fit(const Dataset& data, ScalerMethod method, FactorMode mode) {
  const auto& x = data.features();
  FittedScaler s;
  s.method = method;
  s.mode = mode;
  s.feature_names = data.feature_names();
  s.target_name = data.target_name();

  switch (method) {
    case ScalerMethod::minmax:
      s.params = MinMaxParams{x.colwise().minCoeff().transpose(), x.colwise().maxCoeff().transpose()};
      break;
    case ScalerMethod::standard: {
      const Eigen::VectorXd mean = x.colwise().mean().transpose();
      Eigen::VectorXd stddev(x.cols());
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        stddev(j) = std::sqrt((x.col(j).array() - mean(j)).square().mean());
      s.params = StandardParams{mean, stddev};
      break;
    }
    case ScalerMethod::log: {
      Eigen::VectorXd shift(x.cols());
      for (Eigen::Index j = 0; j < x.cols(); ++j) shift(j) = std::max(0.0, 1.0 - x.col(j).minCoeff());
      s.params = LogParams{shift};
      break;
    }
    case ScalerMethod::robust:
      s.params = fit_quartiles(x);
      break;
    case ScalerMethod::dtization: {
      if (!data.has_target()) throw ArgumentError("dtization is supervised: the dataset needs a target");
      auto factors = calculate_sf(data, exponent(static_cast<int>(data.cols())), mode);
      s.params = DtizationParams{fit_quartiles(x), std::move(factors)};
      break;
    }
  }
  return s;
}

Eigen::VectorXd transform_column(const FittedScaler& scaler, Eigen::Index j,
                                 const Eigen::Ref<const Eigen::VectorXd>& column) {
  const auto x = column.array();
  return std::visit(
      [&](const auto& p) -> Eigen::VectorXd {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MinMaxParams>) {
          return minmax_scale(x, p.min(j), p.max(j)).matrix();
        } else if constexpr (std::is_same_v<P, StandardParams>) {
          return standard_scale(x, p.mean(j), p.stddev(j)).matrix();
        } else if constexpr (std::is_same_v<P, LogParams>) {
          return log_scale(x, p.shift(j)).matrix();
        } else if constexpr (std::is_same_v<P, RobustParams>) {
          return robust_scale(x, p.quartiles(j)).matrix();
        } else {
          return dtization_scale(x, p.quartiles.quartiles(j), p.factors.factors(j)).matrix();
        }
      },
      scaler.params);
}

Dataset transform(const FittedScaler& scaler, const Dataset& data) {
  std::vector<Eigen::Index> source(scaler.feature_names.size());
  std::vector<std::string> missing;
  for (std::size_t j = 0; j < scaler.feature_names.size(); ++j) {
    const auto idx = data.find_feature(scaler.feature_names[j]);
    if (!idx) {
      missing.push_back(scaler.feature_names[j]);
      continue;
    }
    source[j] = *idx;
  }
  if (!missing.empty())
    throw DataError(fmt::format("dataset lacks fitted feature(s): {}", fmt::join(missing, ", ")));
  if (data.cols() > static_cast<Eigen::Index>(source.size())) {
    std::vector<std::string> extra;
    for (const auto& name : data.feature_names())
      if (std::find(scaler.feature_names.begin(), scaler.feature_names.end(), name) ==
          scaler.feature_names.end())
        extra.push_back(name);
    warn(fmt::format("passing through {} unfitted column(s): {}", extra.size(), fmt::join(extra, ", ")));
  }

  Eigen::MatrixXd out = data.features();
  for (std::size_t j = 0; j < source.size(); ++j)
    out.col(source[j]) = transform_column(scaler, static_cast<Eigen::Index>(j), data.column(source[j]));
  return data.with_features(std::move(out));
}

std::string describe(const FittedScaler& scaler) {
  std::string text;
  const auto& names = scaler.feature_names;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        for (std::size_t k = 0; k < names.size(); ++k) {
          const auto j = static_cast<Eigen::Index>(k);
          if constexpr (std::is_same_v<P, MinMaxParams>) {
            text += fmt::format("{} min={:.4f} max={:.4f}\n", names[k], p.min(j), p.max(j));
          } else if constexpr (std::is_same_v<P, StandardParams>) {
            text += fmt::format("{} mean={:.4f} std={:.4f}\n", names[k], p.mean(j), p.stddev(j));
          } else if constexpr (std::is_same_v<P, LogParams>) {
            text += fmt::format("{} shift={:.4f}\n", names[k], p.shift(j));
          } else if constexpr (std::is_same_v<P, RobustParams>) {
            text += fmt::format("{} q1={:.4f} q3={:.4f}\n", names[k], p.q1(j), p.q3(j));
          }
        }
        if constexpr (std::is_same_v<P, DtizationParams>) {
          const auto& t = p.factors;
          text += fmt::format("exponent={:.10f} nf={} mode={}\n", t.exponent, t.nf_total, to_string(t.mode));
          std::vector<std::size_t> order(names.size());
          for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
          // Sorted by depth (unassigned last), then name.
          std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const int da = t.first_depth[a].value_or(std::numeric_limits<int>::max());
            const int db = t.first_depth[b].value_or(std::numeric_limits<int>::max());
            return da != db ? da < db : names[a] < names[b];
          });
          for (const auto k : order) {
            const auto j = static_cast<Eigen::Index>(k);
            const std::string depth = t.first_depth[k] ? std::to_string(*t.first_depth[k]) : "-";
            text += fmt::format("{} depth={} S={:.4f}\n", names[k], depth, t.factors(j));
          }
          text += "quartiles:\n";
          for (std::size_t k = 0; k < names.size(); ++k) {
            const auto j = static_cast<Eigen::Index>(k);
            text += fmt::format("  {} q1={:.4f} q3={:.4f}\n", names[k], p.quartiles.q1(j), p.quartiles.q3(j));
          }
        }
      },
      scaler.params);
  return text;
}

}  // namespace dtz
