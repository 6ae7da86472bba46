#pragma once

#include <Eigen/Core>

#include "pvstack/dataset.hpp"

namespace pvstack {

/// Gaussian kernel width policy for the neighbour-weighted average.
struct BandwidthRule {
  enum class Kind {
    AdaptiveMedian,  // sigma = median distance among the k retrieved neighbours
    Fixed,           // sigma = fixed_sigma
  };
  Kind kind = Kind::AdaptiveMedian;
  double fixed_sigma = 1.0;
  bool operator==(const BandwidthRule&) const = default;
};

/// Lazy k-nearest-neighbour regressor: Euclidean distance, Gaussian similarity
/// weights w_i = exp(-d_i^2 / (2 sigma^2)).
class KnnModel {
public:
  static KnnModel fit(const Dataset& train, int k, BandwidthRule rule = {});

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries) const;

  const Eigen::MatrixXd& x_train() const { return X_; }
  const Eigen::VectorXd& y_train() const { return y_; }
  int k() const { return k_; }
  const BandwidthRule& rule() const { return rule_; }

  KnnModel() = default;
  KnnModel(Eigen::MatrixXd X, Eigen::VectorXd y, int k, BandwidthRule rule);

private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  int k_ = 1;
  BandwidthRule rule_;
};

} // namespace pvstack
