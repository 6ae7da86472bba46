#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "pvstack/dataset.hpp"

namespace pvstack {

struct QrfConfig {
  int n_trees = 300;
  int min_samples_leaf = 5;
  double quantile = 0.4;
  int mtry = 0;           // 0 = max(1, p / 3)
  bool bootstrap = true;  // false = every tree sees the identity sample
  std::uint64_t rng_seed = 0;

  void validate() const;
  int resolve_mtry(int p) const;
  bool operator==(const QrfConfig&) const = default;
};

/// CART regression tree. Internal nodes carry (feature, threshold); x goes
/// left when x[feature] <= threshold. Leaves reference a contiguous range of
/// `leaf_rows`, the bootstrap sample indices that reached them (multiplicity
/// preserved).
struct Tree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_begin = 0;
    int leaf_count = 0;
  };
  std::vector<Node> nodes;
  std::vector<int> leaf_rows;

  int leaf_of(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Quantile regression forest: bagged MSE-split trees whose leaves retain the
/// training rows, queried through the weighted empirical distribution of
/// targets (each tree spreads weight 1/(T * leaf size) over its leaf rows).
class QrfModel {
public:
  static QrfModel fit(const Dataset& train, const QrfConfig& config);

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;  // config quantile
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x, double q) const;
  /// One weight pass shared across quantiles.
  std::vector<double> predict_quantiles(const Eigen::Ref<const Eigen::VectorXd>& x,
                                        std::span<const double> qs) const;
  Eigen::VectorXd predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries,
                                double q) const;

  const std::vector<Tree>& trees() const { return trees_; }
  const Eigen::VectorXd& y_train() const { return y_; }
  const QrfConfig& config() const { return config_; }
  /// Bootstrap row multiset of one tree (grouped by leaf).
  const std::vector<int>& in_bag_rows(std::size_t tree) const { return trees_[tree].leaf_rows; }

  QrfModel() = default;
  QrfModel(std::vector<Tree> trees, Eigen::VectorXd y, QrfConfig config);

private:
  std::vector<Tree> trees_;
  Eigen::VectorXd y_;
  QrfConfig config_;
};

/// Smallest v such that the cumulative weight of {values <= v} reaches
/// q * (total weight).
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double q);

/// Best MSE split of (x column, y) given a leaf-size floor. Returns false when
/// no threshold can leave min_samples_leaf rows on each side. Candidates are
/// midpoints between consecutive distinct sorted values; ties resolve to the
/// lowest threshold.
bool best_split_on_feature(std::span<const double> xs, std::span<const double> ys,
                           int min_samples_leaf, double& threshold, double& child_sse);

} // namespace pvstack
