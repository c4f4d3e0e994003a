#include "dtization/models.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "dtization/diagnostics.hpp"
#include "dtization/error.hpp"

namespace dtz {

KnnModel::KnnModel(Eigen::MatrixXd train_points, std::vector<std::string> train_labels, int k)
    : points_(std::move(train_points)), labels_(std::move(train_labels)), k_(k) {
  if (points_.rows() == 0) throw ArgumentError("knn: empty training set");
  if (static_cast<Eigen::Index>(labels_.size()) != points_.rows())
    throw ArgumentError("knn: label count does not match training rows");
  if (k_ < 1) throw ArgumentError("knn: k must be at least 1");
  if (k_ > points_.rows())
    throw ArgumentError(fmt::format("knn: k={} exceeds {} training rows", k_, points_.rows()));
}

std::vector<std::string> KnnModel::predict(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
  if (queries.cols() != points_.cols())
    throw ArgumentError(fmt::format("knn: query has {} dimensions, model has {}", queries.cols(), points_.cols()));
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  std::vector<double> dist(static_cast<std::size_t>(points_.rows()));
  std::vector<Eigen::Index> order(dist.size());
  for (Eigen::Index q = 0; q < queries.rows(); ++q) out.push_back(predict_one(queries.row(q), dist, order));
  return out;
}

std::string KnnModel::predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& query, std::vector<double>& dist,
                                  std::vector<Eigen::Index>& order) const {
  for (Eigen::Index i = 0; i < points_.rows(); ++i)
    dist[static_cast<std::size_t>(i)] = (points_.row(i) - query).squaredNorm();
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::partial_sort(order.begin(), order.begin() + k_, order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double da = dist[static_cast<std::size_t>(a)];
    const double db = dist[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });

  struct Vote {
    int count = 0;
    double distance_sum = 0.0;
  };
  std::map<std::string_view, Vote> votes;
  for (int i = 0; i < k_; ++i) {
    const auto r = order[static_cast<std::size_t>(i)];
    auto& v = votes[labels_[static_cast<std::size_t>(r)]];
    ++v.count;
    v.distance_sum += std::sqrt(dist[static_cast<std::size_t>(r)]);
  }
  // std::map iterates labels in ascending order, so strict comparisons keep the
  // lexicographically smallest label on a full tie.
  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    const auto& [label, v] = *it;
    const auto& b = best->second;
    if (v.count > b.count ||
        (v.count == b.count && v.distance_sum / v.count < b.distance_sum / b.count))
      best = it;
  }
  return std::string(best->first);
}

OlsModel ols_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.rows() == 0) throw ArgumentError("ols_fit: empty data");
  if (x.rows() != y.size()) throw ArgumentError("ols_fit: row count does not match target length");
  if (!x.allFinite() || !y.allFinite()) throw ArgumentError("ols_fit: non-finite input");

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  OlsModel m;
  if (x.cols() == 0) {
    m.coefficients = Eigen::VectorXd(0);
    m.intercept = y_mean;
    return m;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
  m.rank = cod.rank();
  if (m.rank < x.cols())
    warn(fmt::format("ols: design matrix is rank deficient ({} of {}); using the minimum-norm solution", m.rank,
                     x.cols()));
  m.coefficients = m.rank == 0 ? Eigen::VectorXd::Zero(x.cols()) : Eigen::VectorXd(cod.solve(yc));
  m.intercept = y_mean - x_mean.dot(m.coefficients);
  return m;
}

Eigen::VectorXd ols_predict(const OlsModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() != model.coefficients.size())
    throw ArgumentError(fmt::format("ols_predict: {} columns for {} coefficients", x.cols(),
                                    model.coefficients.size()));
  return (x * model.coefficients).array() + model.intercept;
}

}  // namespace dtz
