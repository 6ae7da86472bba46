#include "pvstack/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#if defined(PVSTACK_HAVE_PAR_STL)
#include <execution>
#endif

#include "pvstack/error.hpp"

namespace pvstack {

KnnModel::KnnModel(Eigen::MatrixXd X, Eigen::VectorXd y, int k, BandwidthRule rule)
    : X_(std::move(X)), y_(std::move(y)), k_(k), rule_(rule) {
  require(k_ >= 1, Errc::InvalidArgument, "k must be positive");
  require(k_ <= X_.rows(), Errc::KTooLarge,
          "k = " + std::to_string(k_) + " exceeds training size " + std::to_string(X_.rows()));
  require(X_.allFinite(), Errc::NonFinite, "training matrix has non-finite entries");
  if (rule_.kind == BandwidthRule::Kind::Fixed)
    require(rule_.fixed_sigma > 0.0, Errc::InvalidArgument, "fixed bandwidth must be positive");
}

KnnModel KnnModel::fit(const Dataset& train, int k, BandwidthRule rule) {
  train.check_consistent();
  require(train.normalized, Errc::InvalidArgument, "kNN expects normalized training data");
  return KnnModel(train.X, train.y, k, rule);
}

double KnnModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(x.size() == X_.cols(), Errc::FeatureMismatch,
          "query has " + std::to_string(x.size()) + " components, model expects " +
              std::to_string(X_.cols()));
  require(x.allFinite(), Errc::NonFinite, "query has non-finite components");

  const Eigen::Index n = X_.rows();
  Eigen::VectorXd dist2 = (X_.rowwise() - x.transpose()).rowwise().squaredNorm();

  // k nearest by (distance, original index); the index tiebreak makes the
  // selection independent of training-row order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto closer = [&](Eigen::Index a, Eigen::Index b) {
    if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + (k_ - 1), order.end(), closer);
  std::sort(order.begin(), order.begin() + k_, closer);

  double sigma;
  if (rule_.kind == BandwidthRule::Kind::Fixed) {
    sigma = rule_.fixed_sigma;
  } else {
    // Median distance among the k retrieved neighbours.
    std::vector<double> d(static_cast<std::size_t>(k_));
    for (int i = 0; i < k_; ++i) d[std::size_t(i)] = std::sqrt(dist2[order[std::size_t(i)]]);
    sigma = (k_ % 2 == 1) ? d[std::size_t(k_ / 2)]
                          : 0.5 * (d[std::size_t(k_ / 2 - 1)] + d[std::size_t(k_ / 2)]);
  }

  if (sigma <= 0.0) {
    // Degenerate adaptive bandwidth: at least half the neighbours coincide
    // with the query, so average over the zero-distance set.
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < k_; ++i) {
      if (dist2[order[std::size_t(i)]] == 0.0) {
        sum += y_[order[std::size_t(i)]];
        ++count;
      }
    }
    return sum / count;
  }

  const double inv = 1.0 / (2.0 * sigma * sigma);
  double wsum = 0.0, wy = 0.0;
  for (int i = 0; i < k_; ++i) {
    const Eigen::Index r = order[std::size_t(i)];
    const double w = std::exp(-dist2[r] * inv);
    wsum += w;
    wy += w * y_[r];
  }
  if (wsum <= 0.0) {
    // All weights underflowed; fall back to the nearest neighbour.
    return y_[order[0]];
  }
  return wy / wsum;
}

Eigen::VectorXd KnnModel::predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
  require(queries.cols() == X_.cols(), Errc::FeatureMismatch, "query width mismatch");
  Eigen::VectorXd out(queries.rows());
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(queries.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  const auto run = [&](Eigen::Index r) { out[r] = predict(queries.row(r).transpose()); };
#if defined(PVSTACK_HAVE_PAR_STL)
  std::for_each(std::execution::par, rows.begin(), rows.end(), run);
#else
  std::for_each(rows.begin(), rows.end(), run);
#endif
  return out;
}

} // namespace pvstack
