#include "pvstack/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "pvstack/dataset.hpp"
#include "pvstack/datetime.hpp"
#include "pvstack/ensemble.hpp"
#include "pvstack/error.hpp"
#include "pvstack/oracles.hpp"
#include "pvstack/qrf.hpp"
#include "pvstack/rng.hpp"
#include "pvstack/svr.hpp"

namespace pvstack {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y) {
  Dataset ds;
  ds.timestamps.assign(std::size_t(X.rows()), 0);
  for (std::size_t i = 0; i < ds.timestamps.size(); ++i)
    ds.timestamps[i] = std::int64_t(i) * kSecondsPerHour;
  ds.feature_names.resize(std::size_t(X.cols()));
  for (std::size_t j = 0; j < ds.feature_names.size(); ++j)
    ds.feature_names[j] = "f" + std::to_string(j);
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.normalized = true;
  return ds;
}

} // namespace

std::vector<SuiteResult> run_svr_oracle_suite(const SuiteOptions& opts) {
  const double pred_tol = opts.corrupt_tolerance ? 0.0 : 1e-3;
  const double obj_tol = opts.corrupt_tolerance ? 0.0 : 1e-3;

  double max_pred_dev = 0.0, max_obj_dev = 0.0;
  double worst_sv_margin = 1.0, worst_out_margin = 1.0;
  bool nu_ok = true;

  for (int inst = 0; inst < opts.svr_instances; ++inst) {
    Rng rng(opts.seed, 1000 + std::uint64_t(inst));
    const int n = 5 + int(rng.uniform_int(0, 25));
    const int p = 1 + int(rng.uniform_int(0, 4));
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = rng.uniform01();
    Eigen::VectorXd freq(p);
    for (int j = 0; j < p; ++j) freq[j] = rng.uniform(0.5, 2.0);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const double s = 0.5 + 0.35 * std::sin(2.0 * M_PI * X.row(i).dot(freq) / p) +
                       0.08 * rng.normal();
      y[i] = std::clamp(s, 0.0, 1.0);
    }

    SvrConfig cfg;
    cfg.nu = rng.uniform(0.15, 0.85);
    cfg.tol = 1e-5;
    cfg.max_iter = 500000;
    const SvrModel model = SvrModel::fit(make_dataset(X, y), cfg);
    const oracle::SvrQpResult ref = oracle::svr_qp_reference(X, y, cfg.nu, cfg.gamma, cfg.c);

    max_obj_dev = std::max(max_obj_dev,
                           std::abs(model.diagnostics().dual_objective - ref.objective));
    for (int probe = 0; probe < 8; ++probe) {
      Eigen::VectorXd q(p);
      for (int j = 0; j < p; ++j) q[j] = rng.uniform01();
      max_pred_dev =
          std::max(max_pred_dev, std::abs(model.predict(q) - oracle::svr_qp_predict(ref, X, cfg.gamma, q)));
    }

    // nu-property with slack 2/n + 1e-6 on both fractions.
    const double slack = 2.0 / n + 1e-6;
    const double sv_threshold = (cfg.c / n) * 1e-8;
    int sv_count = 0;
    for (int i = 0; i < n; ++i)
      if (std::abs(model.theta()[i]) > sv_threshold) ++sv_count;
    int outside = 0;
    for (int i = 0; i < n; ++i) {
      const double err = std::abs(model.predict(X.row(i).transpose()) - y[i]);
      if (err > model.epsilon() * (1.0 + 1e-9) + 1e-9) ++outside;
    }
    const double sv_margin = double(sv_count) / n - (cfg.nu - slack);
    const double out_margin = (cfg.nu + slack) - double(outside) / n;
    worst_sv_margin = std::min(worst_sv_margin, sv_margin);
    worst_out_margin = std::min(worst_out_margin, out_margin);
    if (sv_margin < 0.0 || out_margin < 0.0) nu_ok = false;
  }

  std::vector<SuiteResult> results;
  results.push_back({"svr.predictions_vs_qp_oracle", max_pred_dev <= pred_tol, max_pred_dev,
                     "max |f_smo - f_qp| = " + fmt(max_pred_dev) + " (tol " + fmt(pred_tol) + ")"});
  results.push_back({"svr.objective_vs_qp_oracle", max_obj_dev <= obj_tol, max_obj_dev,
                     "max objective gap = " + fmt(max_obj_dev) + " (tol " + fmt(obj_tol) + ")"});
  results.push_back({"svr.nu_property", nu_ok && !opts.corrupt_tolerance,
                     -std::min(worst_sv_margin, worst_out_margin),
                     "worst SV-fraction margin " + fmt(worst_sv_margin) +
                         ", worst outside-tube margin " + fmt(worst_out_margin)});
  return results;
}

namespace {

struct TreeComparison {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  const Tree& tree;
  int min_leaf;
  int mismatches = 0;

  void walk(int node_id, const std::vector<int>& rows) {
    const Tree::Node& node = tree.nodes[std::size_t(node_id)];
    double ymin = y[rows.front()], ymax = ymin;
    for (int r : rows) {
      ymin = std::min(ymin, y[r]);
      ymax = std::max(ymax, y[r]);
    }
    const oracle::SplitChoice ref =
        oracle::exhaustive_best_split(X, y, rows, min_leaf);
    const bool should_be_leaf = int(rows.size()) < 2 * min_leaf || ymax == ymin || !ref.found;
    if ((node.feature < 0) != should_be_leaf) {
      ++mismatches;
      return;
    }
    if (node.feature < 0) return;
    if (node.feature != ref.feature || node.threshold != ref.threshold) {
      ++mismatches;
      return;
    }
    std::vector<int> left, right;
    for (int r : rows) (X(r, node.feature) <= node.threshold ? left : right).push_back(r);
    walk(node.left, left);
    walk(node.right, right);
  }
};

} // namespace

std::vector<SuiteResult> run_qrf_oracle_suite(const SuiteOptions& opts) {
  int total_mismatches = 0;
  for (int inst = 0; inst < opts.qrf_instances; ++inst) {
    Rng rng(opts.seed, 2000 + std::uint64_t(inst));
    const int min_leaf = 1 + int(rng.uniform_int(0, 2));
    const int n = 2 * min_leaf + int(rng.uniform_int(0, 20 - 2 * min_leaf));
    const int p = 1 + int(rng.uniform_int(0, 2));
    const bool quantized = rng.uniform01() < 0.5;  // create ties half the time
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) {
        double v = rng.uniform01();
        if (quantized) v = std::round(v * 8.0) / 8.0;
        X(i, j) = v;
      }
      y[i] = rng.uniform01();
    }

    QrfConfig cfg;
    cfg.n_trees = 1;
    cfg.min_samples_leaf = min_leaf;
    cfg.bootstrap = false;
    cfg.mtry = p;  // try every feature, as the exhaustive oracle does
    cfg.rng_seed = opts.seed;
    const QrfModel model = QrfModel::fit(make_dataset(X, y), cfg);

    std::vector<int> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[std::size_t(i)] = i;
    TreeComparison cmp{X, y, model.trees()[0], min_leaf};
    cmp.walk(0, rows);
    total_mismatches += cmp.mismatches;
  }

  std::vector<SuiteResult> results;
  results.push_back({"qrf.splits_vs_exhaustive_oracle", total_mismatches == 0,
                     double(total_mismatches),
                     std::to_string(total_mismatches) + " node mismatches over " +
                         std::to_string(opts.qrf_instances) + " trees"});
  return results;
}

std::vector<SuiteResult> run_ensemble_oracle_suite(const SuiteOptions& opts) {
  const double w_tol = opts.corrupt_tolerance ? 0.0 : 1e-6;
  double max_w_dev = 0.0, worst_dominance = 0.0;
  for (int inst = 0; inst < opts.ensemble_instances; ++inst) {
    Rng rng(opts.seed, 3000 + std::uint64_t(inst));
    const int k = 1 + int(rng.uniform_int(0, 4));
    const int m = 10 + int(rng.uniform_int(0, 30));
    Eigen::MatrixXd P(m, k);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < k; ++j) P(i, j) = rng.normal();
      y[i] = rng.normal();
    }
    std::vector<std::string> names;
    for (int j = 0; j < k; ++j) names.push_back("m" + std::to_string(j));
    const EnsembleWeights fit = fit_weights(P, y, names);
    const Eigen::VectorXd ref = oracle::normal_equations_ridge(P, y, 1e-12);
    max_w_dev = std::max(max_w_dev, (fit.w - ref).lpNorm<Eigen::Infinity>());

    double best_single = (P.col(0) - y).squaredNorm();
    for (int j = 1; j < k; ++j) best_single = std::min(best_single, (P.col(j) - y).squaredNorm());
    worst_dominance = std::max(worst_dominance, fit.residual_sq - best_single);
  }

  std::vector<SuiteResult> results;
  results.push_back({"ensemble.pinv_vs_normal_equations", max_w_dev <= w_tol, max_w_dev,
                     "max |w - w_ridge| = " + fmt(max_w_dev) + " (tol " + fmt(w_tol) + ")"});
  results.push_back({"ensemble.sse_dominance", worst_dominance <= 1e-9, worst_dominance,
                     "max (fit SSE - best member SSE) = " + fmt(worst_dominance)});
  return results;
}

std::vector<SuiteResult> run_quantile_oracle_suite(const SuiteOptions& opts) {
  double max_dev = 0.0;
  for (int inst = 0; inst < opts.quantile_instances; ++inst) {
    Rng rng(opts.seed, 4000 + std::uint64_t(inst));
    const int len = 1 + int(rng.uniform_int(0, 49));
    const bool ties = rng.uniform01() < 0.5;
    std::vector<double> values(static_cast<std::size_t>(len)), weights(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
      double v = rng.uniform01();
      if (ties) v = std::round(v * 10.0) / 10.0;
      values[std::size_t(i)] = v;
      weights[std::size_t(i)] = rng.uniform01() < 0.15 ? 0.0 : rng.uniform01();
    }
    weights[std::size_t(rng.uniform_int(0, len - 1))] += 0.5;  // keep the total positive
    const double q = rng.uniform(0.01, 0.99);
    const double got = weighted_quantile(values, weights, q);
    const double want = oracle::weighted_quantile_reference(values, weights, q);
    max_dev = std::max(max_dev, std::abs(got - want));
  }
  std::vector<SuiteResult> results;
  results.push_back({"qrf.weighted_quantile_vs_cdf_walk",
                     max_dev <= (opts.corrupt_tolerance ? -1.0 : 0.0), max_dev,
                     "max |q_impl - q_ref| = " + fmt(max_dev)});
  return results;
}

std::vector<SuiteResult> run_all_oracle_suites(const SuiteOptions& opts) {
  std::vector<SuiteResult> all;
  for (auto&& chunk : {run_svr_oracle_suite(opts), run_qrf_oracle_suite(opts),
                       run_ensemble_oracle_suite(opts), run_quantile_oracle_suite(opts)})
    all.insert(all.end(), chunk.begin(), chunk.end());
  return all;
}

} // namespace pvstack
