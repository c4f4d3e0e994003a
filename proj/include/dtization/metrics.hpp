#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace dtz {

using CountMatrix = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are actual classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  CountMatrix counts;

  long total() const { return counts.sum(); }
};

struct ClassificationReport {
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f1 = 0.0;         // macro
  double mcc = 0.0;
};

struct RegressionReport {
  double mae = 0.0;
  double mse = 0.0;
  double r2 = 0.0;
};

/// Classes are the sorted union of both label lists.
ConfusionMatrix confusion_matrix(std::span<const std::string> y_true, std::span<const std::string> y_pred);

/// Accuracy, macro precision/recall/F1 (one-vs-rest per class, unweighted
/// mean, 0/0 -> 0) and MCC (multiclass covariance form, 0 when undefined).
ClassificationReport classification_metrics(const ConfusionMatrix& cm);

/// Binary MCC from the four cells: (TP*TN - FP*FN) / sqrt(...), 0 when undefined.
double binary_mcc(double tp, double tn, double fp, double fn);

/// Multiclass MCC: (c*s - sum p_k t_k) / sqrt((s^2 - sum p_k^2)(s^2 - sum t_k^2)).
double multiclass_mcc(const CountMatrix& counts);

/// MAE, MSE and R^2 (R^2 = 0 with a warning when y_true has zero variance).
RegressionReport regression_metrics(const Eigen::Ref<const Eigen::VectorXd>& y_true,
                                    const Eigen::Ref<const Eigen::VectorXd>& y_pred);

}  // namespace dtz
