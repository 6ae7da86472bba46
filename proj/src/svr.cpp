#include "pvstack/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "pvstack/error.hpp"

namespace pvstack {

void SvrConfig::validate() const {
  require(nu > 0.0 && nu <= 1.0, Errc::ConfigError, "nu must lie in (0, 1]");
  require(gamma > 0.0, Errc::ConfigError, "gamma must be positive");
  require(c > 0.0, Errc::ConfigError, "c must be positive");
  require(tol > 0.0, Errc::ConfigError, "tol must be positive");
  require(max_iter > 0, Errc::ConfigError, "max_iter must be positive");
}

Eigen::MatrixXd rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& X, double gamma) {
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd g = -2.0 * (X * X.transpose());
  g.colwise() += sq;
  g.rowwise() += sq.transpose();
  return (-gamma * g.array()).exp();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// LRU cache of kernel rows; SMO touches two rows per iteration.
class KernelRowCache {
public:
  KernelRowCache(const Eigen::MatrixXd& X, double gamma, std::size_t budget_bytes)
      : X_(X), gamma_(gamma), sq_(X.rowwise().squaredNorm()) {
    const std::size_t row_bytes = 8 * std::size_t(X.rows());
    capacity_ = std::max<std::size_t>(4, budget_bytes / std::max<std::size_t>(1, row_bytes));
  }

  const Eigen::VectorXd& row(int i) {
    auto it = map_.find(i);
    if (it != map_.end()) {
      order_.splice(order_.begin(), order_, it->second.first);
      return it->second.second;
    }
    Eigen::VectorXd r =
        (-gamma_ * (sq_.array() + sq_[i] - 2.0 * (X_ * X_.row(i).transpose()).array())).exp();
    order_.push_front(i);
    auto [pos, inserted] = map_.emplace(i, std::make_pair(order_.begin(), std::move(r)));
    (void)inserted;
    while (map_.size() > capacity_) {
      map_.erase(order_.back());
      order_.pop_back();
    }
    return pos->second.second;
  }

private:
  const Eigen::MatrixXd& X_;
  double gamma_;
  Eigen::VectorXd sq_;
  std::size_t capacity_;
  std::list<int> order_;
  std::unordered_map<int, std::pair<std::list<int>::iterator, Eigen::VectorXd>> map_;
};

struct Solution {
  Eigen::VectorXd theta;     // alpha - alpha*
  Eigen::VectorXd grad;      // (Q theta)_i - y_i
  Eigen::VectorXd alpha_p, alpha_m;
  SvrDiagnostics diag;
};

/// SMO over the paired variables. Both equality constraints
/// (sum alpha = sum alpha* = c*nu/2) hold throughout because every update
/// moves mass between two variables of the same kind.
Solution solve_smo(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrConfig& cfg) {
  const int n = int(X.rows());
  const double ub = cfg.c / n;

  Solution s;
  s.alpha_p.setZero(n);
  s.alpha_m.setZero(n);
  double budget = cfg.c * cfg.nu / 2.0;
  for (int i = 0; i < n && budget > 0.0; ++i) {
    const double a = std::min(ub, budget);
    s.alpha_p[i] = a;
    s.alpha_m[i] = a;
    budget -= a;
  }
  s.theta.setZero(n);       // alpha_p == alpha_m
  s.grad = -y;              // Q theta == 0

  KernelRowCache cache(X, cfg.gamma, cfg.cache_bytes);

  // Incremental dual objective (maximization form): y' theta - theta' Q theta / 2.
  double quad = 0.0, lin = 0.0;
  if (cfg.track_objective) s.diag.objective_trace.push_back(0.0);

  long iter = 0;
  double viol = kInf;
  for (; iter < cfg.max_iter; ++iter) {
    // Maximal violating pair within each variable kind.
    int pi = -1, pj = -1, mi = -1, mj = -1;
    double p_up = kInf, p_dn = -kInf;   // min/max grad over movable alpha_p
    double m_up = -kInf, m_dn = kInf;   // max/min grad over movable alpha_m
    for (int t = 0; t < n; ++t) {
      const double g = s.grad[t];
      if (s.alpha_p[t] < ub && g < p_up) { p_up = g; pi = t; }
      if (s.alpha_p[t] > 0.0 && g > p_dn) { p_dn = g; pj = t; }
      if (s.alpha_m[t] < ub && g > m_up) { m_up = g; mi = t; }
      if (s.alpha_m[t] > 0.0 && g < m_dn) { m_dn = g; mj = t; }
    }
    const double viol_p = (pi >= 0 && pj >= 0) ? p_dn - p_up : -kInf;
    const double viol_m = (mi >= 0 && mj >= 0) ? m_up - m_dn : -kInf;
    viol = std::max(viol_p, viol_m);
    if (viol <= cfg.tol) break;

    const bool plus = viol_p >= viol_m;
    const int i = plus ? pi : mi;
    const int j = plus ? pj : mj;

    const Eigen::VectorXd& ki = cache.row(i);
    // Copy: fetching row j may evict row i.
    const Eigen::VectorXd ki_copy = ki;
    const Eigen::VectorXd& kj = cache.row(j);

    const double eta = std::max(ki_copy[i] + kj[j] - 2.0 * ki_copy[j], 1e-12);
    const double gap = plus ? (s.grad[j] - s.grad[i]) : (s.grad[i] - s.grad[j]);
    double step = gap / eta;
    auto& a = plus ? s.alpha_p : s.alpha_m;
    const double cap_i = ub - a[i];
    const double cap_j = a[j];
    step = std::min(step, std::min(cap_i, cap_j));
    a[i] += step;
    a[j] -= step;
    if (step == cap_i) a[i] = ub;  // keep bound states exact
    if (step == cap_j) a[j] = 0.0;

    const double sgn = plus ? 1.0 : -1.0;
    if (cfg.track_objective) {
      const double qi = s.grad[i] + y[i];  // (Q theta)_i before the update
      const double qj = s.grad[j] + y[j];
      quad += sgn * 2.0 * step * (qi - qj) + step * step * eta;
      lin += sgn * step * (y[i] - y[j]);
      s.diag.objective_trace.push_back(lin - 0.5 * quad);
    }
    s.theta[i] += sgn * step;
    s.theta[j] -= sgn * step;
    s.grad += sgn * step * (ki_copy - kj);
  }

  s.diag.iterations = iter;
  s.diag.kkt_violation = viol;
  s.diag.converged = viol <= cfg.tol;
  s.diag.n_train = n;
  return s;
}

/// Bias and tube width from the KKT conditions: free plus-side variables pin
/// b + eps, free minus-side variables pin b - eps; bound midpoints otherwise.
void recover_bias_epsilon(const Solution& s, double ub, double& bias, double& epsilon) {
  const auto midpoint = [](double lo, double hi) {
    if (std::isinf(lo)) return std::isinf(hi) ? 0.0 : hi;
    if (std::isinf(hi)) return lo;
    return 0.5 * (lo + hi);
  };
  // Plus side: free variables pin r1 = b + eps; at-bound variables only
  // bracket it (alpha = 0 gives a lower bound, alpha = c/n an upper bound).
  double r1;
  {
    double free_sum = 0.0;
    int free_count = 0;
    double lo = -kInf, hi = kInf;
    for (int i = 0; i < s.alpha_p.size(); ++i) {
      const double v = -s.grad[i];  // y_i - (Q theta)_i
      if (s.alpha_p[i] > 0.0 && s.alpha_p[i] < ub) { free_sum += v; ++free_count; }
      else if (s.alpha_p[i] == 0.0) lo = std::max(lo, v);
      else hi = std::min(hi, v);
    }
    r1 = free_count > 0 ? free_sum / free_count : midpoint(lo, hi);
  }
  // Minus side: r2 = b - eps, with the bound directions mirrored.
  double r2;
  {
    double free_sum = 0.0;
    int free_count = 0;
    double lo = -kInf, hi = kInf;
    for (int i = 0; i < s.alpha_m.size(); ++i) {
      const double v = -s.grad[i];
      if (s.alpha_m[i] > 0.0 && s.alpha_m[i] < ub) { free_sum += v; ++free_count; }
      else if (s.alpha_m[i] == 0.0) hi = std::min(hi, v);
      else lo = std::max(lo, v);
    }
    r2 = free_count > 0 ? free_sum / free_count : midpoint(lo, hi);
  }
  bias = 0.5 * (r1 + r2);
  epsilon = std::max(0.0, 0.5 * (r1 - r2));
}

} // namespace

SvrModel::SvrModel(Eigen::MatrixXd sv, Eigen::VectorXd coeffs, double bias, double epsilon,
                   SvrConfig config, SvrDiagnostics diag, Eigen::VectorXd theta)
    : sv_(std::move(sv)), coeffs_(std::move(coeffs)), bias_(bias), epsilon_(epsilon),
      config_(config), diag_(std::move(diag)), theta_(std::move(theta)) {
  require(sv_.rows() == coeffs_.size(), Errc::InvalidArgument,
          "support vector and coefficient counts disagree");
}

SvrModel SvrModel::fit(const Dataset& train, const SvrConfig& config) {
  config.validate();
  train.check_consistent();
  require(train.normalized, Errc::InvalidArgument, "nu-SVR expects normalized training data");
  const int n = int(train.rows());
  require(n >= 2, Errc::TooFewSamples, "nu-SVR needs at least 2 rows");
  require(train.X.allFinite() && train.y.allFinite(), Errc::NonFinite,
          "training data has non-finite entries");

  bool all_same = true;
  for (int i = 1; i < n && all_same; ++i)
    all_same = (train.X.row(i) - train.X.row(0)).cwiseAbs().maxCoeff() == 0.0;
  if (all_same)
    fail(Errc::DegenerateKernel, "all training rows identical; kernel matrix is rank one");

  Solution s = solve_smo(train.X, train.y, config);
  if (!s.diag.converged)
    fail(Errc::NoConvergence,
         "SMO exceeded max_iter = " + std::to_string(config.max_iter) +
             " (KKT violation " + std::to_string(s.diag.kkt_violation) + ", tol " +
             std::to_string(config.tol) + ")");

  const double ub = config.c / n;
  double bias = 0.0, epsilon = 0.0;
  recover_bias_epsilon(s, ub, bias, epsilon);

  const double sv_tol = ub * 1e-8;
  std::vector<int> sv_ids;
  for (int i = 0; i < n; ++i)
    if (std::abs(s.theta[i]) > sv_tol) sv_ids.push_back(i);

  Eigen::MatrixXd sv(Eigen::Index(sv_ids.size()), train.cols());
  Eigen::VectorXd coeffs(Eigen::Index(sv_ids.size()));
  for (std::size_t r = 0; r < sv_ids.size(); ++r) {
    sv.row(Eigen::Index(r)) = train.X.row(sv_ids[r]);
    coeffs[Eigen::Index(r)] = s.theta[sv_ids[r]];
  }

  // Final dual objective for diagnostics (exact, not the incremental trace).
  const Eigen::MatrixXd gram = n <= 2000 ? rbf_gram(train.X, config.gamma) : Eigen::MatrixXd();
  if (gram.size() > 0)
    s.diag.dual_objective = train.y.dot(s.theta) - 0.5 * s.theta.dot(gram * s.theta);

  return SvrModel(std::move(sv), std::move(coeffs), bias, epsilon, config, std::move(s.diag),
                  std::move(s.theta));
}

double SvrModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(x.size() == sv_.cols() || sv_.rows() == 0, Errc::FeatureMismatch,
          "query width mismatch");
  require(x.allFinite(), Errc::NonFinite, "query has non-finite components");
  if (sv_.rows() == 0) return bias_;
  const Eigen::VectorXd d2 = (sv_.rowwise() - x.transpose()).rowwise().squaredNorm();
  return coeffs_.dot((-config_.gamma * d2.array()).exp().matrix()) + bias_;
}

Eigen::VectorXd SvrModel::predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries) const {
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index r = 0; r < queries.rows(); ++r) out[r] = predict(queries.row(r).transpose());
  return out;
}

} // namespace pvstack
