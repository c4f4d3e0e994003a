#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace dtz {

/// Unweighted k-nearest-neighbour classifier with Euclidean distance.
class KnnModel {
 public:
  KnnModel(Eigen::MatrixXd train_points, std::vector<std::string> train_labels, int k = 3);

  /// One label per query row. Neighbours are the k smallest (distance, row)
  /// pairs; vote ties go to the smallest mean neighbour distance, then to the
  /// lexicographically smallest label.
  std::vector<std::string> predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const;

  int k() const { return k_; }
  Eigen::Index dimension() const { return points_.cols(); }

 private:
  std::string predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& query, std::vector<double>& dist,
                          std::vector<Eigen::Index>& order) const;

  Eigen::MatrixXd points_;
  std::vector<std::string> labels_;
  int k_;
};

struct OlsModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  Eigen::Index rank = 0;
};

/// Least squares with an intercept. Columns are centred, the centred system is
/// solved by complete orthogonal decomposition (minimum-norm coefficients when
/// rank deficient, with a warning), and the intercept restores the means.
OlsModel ols_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

Eigen::VectorXd ols_predict(const OlsModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

}  // namespace dtz
