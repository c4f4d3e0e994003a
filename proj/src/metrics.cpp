#include "dtization/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"

namespace dtz {

ConfusionMatrix confusion_matrix(std::span<const std::string> y_true, std::span<const std::string> y_pred) {
  if (y_true.size() != y_pred.size())
    throw ArgumentError(fmt::format("confusion_matrix: {} true vs {} predicted labels", y_true.size(),
                                    y_pred.size()));
  if (y_true.empty()) throw ArgumentError("confusion_matrix: empty input");

  std::set<std::string> labels(y_true.begin(), y_true.end());
  labels.insert(y_pred.begin(), y_pred.end());
  ConfusionMatrix cm{{labels.begin(), labels.end()}, {}};
  const auto k = static_cast<Eigen::Index>(cm.classes.size());
  cm.counts = CountMatrix::Zero(k, k);
  const auto index = [&](const std::string& l) {
    return static_cast<Eigen::Index>(std::lower_bound(cm.classes.begin(), cm.classes.end(), l) -
                                     cm.classes.begin());
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts(index(y_true[i]), index(y_pred[i]));
  return cm;
}

double binary_mcc(double tp, double tn, double fp, double fn) {
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / denom;
}

double multiclass_mcc(const CountMatrix& counts) {
  const Eigen::MatrixXd c = counts.cast<double>();
  const double s = c.sum();
  const double correct = c.trace();
  const Eigen::VectorXd t = c.rowwise().sum();  // actual
  const Eigen::VectorXd p = c.colwise().sum().transpose();  // predicted
  const double cov_xy = correct * s - p.dot(t);
  const double cov_xx = s * s - p.squaredNorm();
  const double cov_yy = s * s - t.squaredNorm();
  const double denom = std::sqrt(cov_xx * cov_yy);
  if (denom == 0.0) return 0.0;
  return cov_xy / denom;
}

ClassificationReport classification_metrics(const ConfusionMatrix& cm) {
  const auto k = cm.counts.rows();
  if (k == 0 || cm.total() == 0) throw ArgumentError("classification_metrics: empty confusion matrix");
  const Eigen::MatrixXd c = cm.counts.cast<double>();
  const double total = c.sum();

  ClassificationReport r;
  r.accuracy = c.trace() / total;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double tp = c(i, i);
    const double fp = c.col(i).sum() - tp;
    const double fn = c.row(i).sum() - tp;
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    r.precision += precision;
    r.recall += recall;
    r.f1 += f1;
  }
  r.precision /= static_cast<double>(k);
  r.recall /= static_cast<double>(k);
  r.f1 /= static_cast<double>(k);
  r.mcc = multiclass_mcc(cm.counts);
  return r;
}

RegressionReport regression_metrics(const Eigen::Ref<const Eigen::VectorXd>& y_true,
                                    const Eigen::Ref<const Eigen::VectorXd>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw ArgumentError(fmt::format("regression_metrics: {} true vs {} predicted values", y_true.size(),
                                    y_pred.size()));
  if (y_true.size() == 0) throw ArgumentError("regression_metrics: empty input");

  const Eigen::ArrayXd residual = (y_true - y_pred).array();
  RegressionReport r;
  r.mae = residual.abs().mean();
  r.mse = residual.square().mean();
  const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
  if (ss_tot == 0.0) {
    warn("R^2 undefined for a constant target; reporting 0");
    r.r2 = 0.0;
  } else {
    r.r2 = 1.0 - residual.square().sum() / ss_tot;
  }
  return r;
}

}  // namespace dtz
