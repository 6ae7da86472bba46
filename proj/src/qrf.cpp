#include "pvstack/qrf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#if defined(PVSTACK_HAVE_PAR_STL)
#include <execution>
#endif

#include "pvstack/error.hpp"
#include "pvstack/rng.hpp"

namespace pvstack {

void QrfConfig::validate() const {
  require(n_trees >= 1, Errc::ConfigError, "n_trees must be positive");
  require(min_samples_leaf >= 1, Errc::ConfigError, "min_samples_leaf must be positive");
  require(quantile > 0.0 && quantile < 1.0, Errc::ConfigError, "quantile must lie in (0, 1)");
  require(mtry >= 0, Errc::ConfigError, "mtry must be non-negative");
}

int QrfConfig::resolve_mtry(int p) const {
  if (mtry > 0) return std::min(mtry, p);
  return std::max(1, p / 3);
}

int Tree::leaf_of(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int id = 0;
  while (nodes[std::size_t(id)].feature >= 0) {
    const Node& nd = nodes[std::size_t(id)];
    id = (x[nd.feature] <= nd.threshold) ? nd.left : nd.right;
  }
  return id;
}

// Two candidates whose SSEs differ by less than this margin count as tied, so
// the deterministic tie rule (lowest feature, lowest threshold) is not at the
// mercy of summation order.
static bool sse_improves(double sse, double best) { return sse < best - 1e-12 * (1.0 + best); }

bool best_split_on_feature(std::span<const double> xs, std::span<const double> ys,
                           int min_samples_leaf, double& threshold, double& child_sse) {
  const int m = int(xs.size());
  if (m < 2 * min_samples_leaf) return false;

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return xs[std::size_t(a)] < xs[std::size_t(b)];
  });

  // Prefix sums over the sorted order.
  std::vector<double> sum(std::size_t(m) + 1, 0.0), sum2(std::size_t(m) + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    const double v = ys[std::size_t(order[std::size_t(i)])];
    sum[std::size_t(i) + 1] = sum[std::size_t(i)] + v;
    sum2[std::size_t(i) + 1] = sum2[std::size_t(i)] + v * v;
  }

  bool found = false;
  for (int nl = min_samples_leaf; nl <= m - min_samples_leaf; ++nl) {
    const double lo = xs[std::size_t(order[std::size_t(nl - 1)])];
    const double hi = xs[std::size_t(order[std::size_t(nl)])];
    if (lo == hi) continue;  // not a boundary between distinct values
    const int nr = m - nl;
    const double sse_left = sum2[std::size_t(nl)] - sum[std::size_t(nl)] * sum[std::size_t(nl)] / nl;
    const double sum_r = sum[std::size_t(m)] - sum[std::size_t(nl)];
    const double sse_right = (sum2[std::size_t(m)] - sum2[std::size_t(nl)]) - sum_r * sum_r / nr;
    const double sse = sse_left + sse_right;
    if (!found || sse < child_sse) {
      found = true;
      child_sse = sse;
      threshold = 0.5 * (lo + hi);
    }
  }
  return found;
}

namespace {

struct TreeGrower {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  int min_leaf;
  int mtry;
  Rng& rng;
  Tree& tree;
  std::vector<int> feature_pool;  // scratch for mtry sampling

  int grow(std::vector<int>& rows) {
    const int id = int(tree.nodes.size());
    tree.nodes.emplace_back();

    double ymin = y[rows.front()], ymax = ymin;
    for (int r : rows) {
      ymin = std::min(ymin, y[r]);
      ymax = std::max(ymax, y[r]);
    }

    int best_feature = -1;
    double best_threshold = 0.0, best_sse = 0.0;
    if (int(rows.size()) >= 2 * min_leaf && ymax > ymin) {
      sample_features();
      std::vector<double> xs(rows.size()), ys(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = y[rows[i]];
      for (int mi = 0; mi < mtry; ++mi) {
        const int f = feature_pool[std::size_t(mi)];
        for (std::size_t i = 0; i < rows.size(); ++i) xs[i] = X(rows[i], f);
        double threshold = 0.0, sse = 0.0;
        if (best_split_on_feature(xs, ys, min_leaf, threshold, sse)) {
          if (best_feature < 0 || sse < best_sse) {
            best_feature = f;
            best_threshold = threshold;
            best_sse = sse;
          }
        }
      }
    }

    if (best_feature < 0) {
      Tree::Node& nd = tree.nodes[std::size_t(id)];
      nd.leaf_begin = int(tree.leaf_rows.size());
      nd.leaf_count = int(rows.size());
      tree.leaf_rows.insert(tree.leaf_rows.end(), rows.begin(), rows.end());
      return id;
    }

    std::vector<int> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (int r : rows)
      (X(r, best_feature) <= best_threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int left_id = grow(left);
    const int right_id = grow(right);
    Tree::Node& nd = tree.nodes[std::size_t(id)];
    nd.feature = best_feature;
    nd.threshold = best_threshold;
    nd.left = left_id;
    nd.right = right_id;
    return id;
  }

  // mtry distinct features, ascending, via partial Fisher-Yates.
  void sample_features() {
    const int p = int(feature_pool.size());
    for (int i = 0; i < mtry; ++i) {
      const int j = i + int(rng.uniform_int(0, p - 1 - i));
      std::swap(feature_pool[std::size_t(i)], feature_pool[std::size_t(j)]);
    }
    std::sort(feature_pool.begin(), feature_pool.begin() + mtry);
  }
};

} // namespace

QrfModel::QrfModel(std::vector<Tree> trees, Eigen::VectorXd y, QrfConfig config)
    : trees_(std::move(trees)), y_(std::move(y)), config_(config) {
  config_.validate();
  require(int(trees_.size()) == config_.n_trees, Errc::InvalidArgument,
          "tree count does not match configuration");
}

QrfModel QrfModel::fit(const Dataset& train, const QrfConfig& config) {
  config.validate();
  train.check_consistent();
  const int n = int(train.rows());
  if (n < 2 * config.min_samples_leaf)
    fail(Errc::TooFewSamples, "need at least " + std::to_string(2 * config.min_samples_leaf) +
                                  " rows, got " + std::to_string(n));
  const int p = int(train.cols());
  const int mtry = config.resolve_mtry(p);

  std::vector<Tree> trees(static_cast<std::size_t>(config.n_trees));
  std::vector<int> tree_ids(static_cast<std::size_t>(config.n_trees));
  std::iota(tree_ids.begin(), tree_ids.end(), 0);

  // Each tree draws from its own seed-derived stream, so results do not
  // depend on scheduling.
  const auto build = [&](int t) {
    Rng rng(config.rng_seed, std::uint64_t(t));
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (config.bootstrap) {
      for (int i = 0; i < n; ++i) rows[std::size_t(i)] = int(rng.uniform_int(0, n - 1));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeGrower grower{train.X, train.y, config.min_samples_leaf, mtry, rng,
                      trees[std::size_t(t)], {}};
    grower.feature_pool.resize(std::size_t(p));
    std::iota(grower.feature_pool.begin(), grower.feature_pool.end(), 0);
    grower.grow(rows);
  };
#if defined(PVSTACK_HAVE_PAR_STL)
  std::for_each(std::execution::par, tree_ids.begin(), tree_ids.end(), build);
#else
  std::for_each(tree_ids.begin(), tree_ids.end(), build);
#endif

  return QrfModel(std::move(trees), train.y, config);
}

double QrfModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return predict(x, config_.quantile);
}

double QrfModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x, double q) const {
  return predict_quantiles(x, std::span<const double>(&q, 1))[0];
}

std::vector<double> QrfModel::predict_quantiles(const Eigen::Ref<const Eigen::VectorXd>& x,
                                                std::span<const double> qs) const {
  for (double q : qs)
    require(q > 0.0 && q < 1.0, Errc::InvalidArgument, "quantile must lie in (0, 1)");
  require(x.allFinite(), Errc::NonFinite, "query has non-finite components");

  // Meinshausen weights: each tree spreads 1/(T * |leaf|) over its leaf rows.
  std::vector<double> w(static_cast<std::size_t>(y_.size()), 0.0);
  const double tree_share = 1.0 / double(trees_.size());
  for (const Tree& tree : trees_) {
    const Tree::Node& leaf = tree.nodes[std::size_t(tree.leaf_of(x))];
    const double row_share = tree_share / leaf.leaf_count;
    for (int i = 0; i < leaf.leaf_count; ++i)
      w[std::size_t(tree.leaf_rows[std::size_t(leaf.leaf_begin + i)])] += row_share;
  }

  std::vector<double> values, weights;
  values.reserve(w.size());
  weights.reserve(w.size());
  for (std::size_t r = 0; r < w.size(); ++r) {
    if (w[r] > 0.0) {
      values.push_back(y_[Eigen::Index(r)]);
      weights.push_back(w[r]);
    }
  }

  std::vector<double> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(weighted_quantile(values, weights, q));
  return out;
}

Eigen::VectorXd QrfModel::predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries,
                                        double q) const {
  Eigen::VectorXd out(queries.rows());
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(queries.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  const auto run = [&](Eigen::Index r) { out[r] = predict(queries.row(r).transpose(), q); };
#if defined(PVSTACK_HAVE_PAR_STL)
  std::for_each(std::execution::par, rows.begin(), rows.end(), run);
#else
  std::for_each(rows.begin(), rows.end(), run);
#endif
  return out;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double q) {
  require(values.size() == weights.size(), Errc::LengthMismatch,
          "values and weights differ in length");
  require(!values.empty(), Errc::InvalidArgument, "weighted quantile of nothing");
  require(q > 0.0 && q < 1.0, Errc::InvalidArgument, "quantile must lie in (0, 1)");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, Errc::InvalidArgument, "negative weight");
    require(std::isfinite(values[i]), Errc::NonFinite, "non-finite value");
    total += weights[i];
  }
  if (total <= 0.0) fail(Errc::AllZeroWeights, "weights sum to zero");

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  const double target = q * total;
  double cum = 0.0;
  for (std::size_t i : order) {
    cum += weights[i];
    if (cum >= target) return values[i];
  }
  return values[order.back()];  // guard against rounding in the final step
}

} // namespace pvstack
