#include "pvstack/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "pvstack/error.hpp"
#include "pvstack/svr.hpp"

namespace pvstack::oracle {

namespace {

Eigen::VectorXd shrink_clamp(const Eigen::Ref<const Eigen::VectorXd>& z, double lambda, double mu,
                             double box) {
  // Componentwise clamp(soft-threshold(z - lambda, mu), -box, box).
  Eigen::ArrayXd a = z.array() - lambda;
  Eigen::ArrayXd soft = a.sign() * (a.abs() - mu).max(0.0);
  return soft.min(box).max(-box).matrix();
}

// Solve sum(theta(lambda, mu)) = 0 for lambda by bisection.
double solve_lambda(const Eigen::Ref<const Eigen::VectorXd>& z, double mu, double box) {
  double lo = z.minCoeff() - mu - box - 1.0;
  double hi = z.maxCoeff() + mu + box + 1.0;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shrink_clamp(z, mid, mu, box).sum() > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

Eigen::VectorXd project_svr_dual(const Eigen::Ref<const Eigen::VectorXd>& z, double box,
                                 double l1_budget) {
  double lambda = solve_lambda(z, 0.0, box);
  Eigen::VectorXd theta = shrink_clamp(z, lambda, 0.0, box);
  if (theta.lpNorm<1>() <= l1_budget) return theta;

  // The L1 constraint is active: bisect its multiplier.
  double mu_lo = 0.0;
  double mu_hi = z.cwiseAbs().maxCoeff() + box + 1.0;
  for (int it = 0; it < 120; ++it) {
    const double mu = 0.5 * (mu_lo + mu_hi);
    lambda = solve_lambda(z, mu, box);
    theta = shrink_clamp(z, lambda, mu, box);
    (theta.lpNorm<1>() > l1_budget ? mu_lo : mu_hi) = mu;
  }
  lambda = solve_lambda(z, mu_hi, box);
  return shrink_clamp(z, lambda, mu_hi, box);
}

SvrQpResult svr_qp_reference(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double nu, double gamma,
                             double c, int max_iter) {
  const int n = int(X.rows());
  const double box = c / n;
  const double budget = c * nu;
  const Eigen::MatrixXd q = rbf_gram(X, gamma);

  // FISTA on f(theta) = theta' Q theta / 2 - y' theta.
  const double lip =
      std::max(1e-12, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd momentum = theta;
  double t_acc = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = q * momentum - y;
    Eigen::VectorXd next = project_svr_dual(momentum - grad / lip, box, budget);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
    momentum = next + ((t_acc - 1.0) / t_next) * (next - theta);
    const double moved = (next - theta).lpNorm<Eigen::Infinity>();
    theta = std::move(next);
    t_acc = t_next;
    if (moved < 1e-15) break;
  }

  SvrQpResult out;
  out.theta = theta;
  out.objective = y.dot(theta) - 0.5 * theta.dot(q * theta);

  // KKT recovery of bias and tube width. Free positive coefficients satisfy
  // y_i - (Q theta)_i = b + eps, free negative ones y_i - (Q theta)_i = b - eps.
  const Eigen::VectorXd v = y - q * theta;
  const double edge = box * 1e-6;
  double sum1 = 0.0, sum2 = 0.0;
  int n1 = 0, n2 = 0;
  for (int i = 0; i < n; ++i) {
    if (theta[i] > edge && theta[i] < box - edge) {
      sum1 += v[i];
      ++n1;
    } else if (theta[i] < -edge && theta[i] > -box + edge) {
      sum2 += v[i];
      ++n2;
    }
  }
  // KKT interval fallbacks when a side has no free coefficients:
  // b + eps is bounded below by v_i over {theta_i <= 0} and above over
  // {theta_i = box}; b - eps mirrors.
  double lo1 = -std::numeric_limits<double>::infinity(), hi1 = -lo1;
  double lo2 = lo1, hi2 = hi1;
  for (int i = 0; i < n; ++i) {
    if (theta[i] >= box - edge) hi1 = std::min(hi1, v[i]);
    if (theta[i] <= edge) lo1 = std::max(lo1, v[i]);
    if (theta[i] <= -box + edge) lo2 = std::max(lo2, v[i]);
    if (theta[i] >= -edge) hi2 = std::min(hi2, v[i]);
  }
  const auto mid = [](double lo, double hi) {
    if (std::isinf(lo)) return std::isinf(hi) ? 0.0 : hi;
    if (std::isinf(hi)) return lo;
    return 0.5 * (lo + hi);
  };
  const double r1 = n1 > 0 ? sum1 / n1 : mid(lo1, hi1);
  const double r2 = n2 > 0 ? sum2 / n2 : mid(lo2, hi2);
  out.bias = 0.5 * (r1 + r2);
  out.epsilon = std::max(0.0, 0.5 * (r1 - r2));
  return out;
}

double svr_qp_predict(const SvrQpResult& sol, const Eigen::Ref<const Eigen::MatrixXd>& X_train,
                      double gamma, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd d2 = (X_train.rowwise() - x.transpose()).rowwise().squaredNorm();
  return sol.theta.dot((-gamma * d2.array()).exp().matrix()) + sol.bias;
}

SplitChoice exhaustive_best_split(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& y,
                                  std::span<const int> rows, int min_samples_leaf) {
  SplitChoice best;
  const int m = int(rows.size());
  for (int f = 0; f < X.cols(); ++f) {
    std::vector<double> values;
    values.reserve(std::size_t(m));
    for (int r : rows) values.push_back(X(r, f));
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i + 1 < m; ++i) {
      if (sorted[std::size_t(i)] == sorted[std::size_t(i) + 1]) continue;
      const double threshold = 0.5 * (sorted[std::size_t(i)] + sorted[std::size_t(i) + 1]);
      // Direct two-pass SSE of each side.
      double mean_l = 0.0, mean_r = 0.0;
      int nl = 0, nr = 0;
      for (int k = 0; k < m; ++k) {
        if (values[std::size_t(k)] <= threshold) {
          mean_l += y[rows[std::size_t(k)]];
          ++nl;
        } else {
          mean_r += y[rows[std::size_t(k)]];
          ++nr;
        }
      }
      if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
      mean_l /= nl;
      mean_r /= nr;
      double sse = 0.0;
      for (int k = 0; k < m; ++k) {
        const double t = y[rows[std::size_t(k)]];
        const double d = values[std::size_t(k)] <= threshold ? t - mean_l : t - mean_r;
        sse += d * d;
      }
      if (!best.found || sse < best.child_sse) {
        best.found = true;
        best.feature = f;
        best.threshold = threshold;
        best.child_sse = sse;
      }
    }
  }
  return best;
}

Eigen::VectorXd normal_equations_ridge(const Eigen::Ref<const Eigen::MatrixXd>& P,
                                       const Eigen::Ref<const Eigen::VectorXd>& y, double ridge) {
  const Eigen::MatrixXd a =
      P.transpose() * P + ridge * Eigen::MatrixXd::Identity(P.cols(), P.cols());
  return Eigen::LDLT<Eigen::MatrixXd>(a).solve(P.transpose() * y);
}

double weighted_quantile_reference(std::span<const double> values,
                                   std::span<const double> weights, double q) {
  require(values.size() == weights.size() && !values.empty(), Errc::LengthMismatch,
          "bad quantile input");
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(values.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < values.size(); ++i) {
    pairs.emplace_back(values[i], weights[i]);
    total += weights[i];
  }
  require(total > 0.0L, Errc::AllZeroWeights, "weights sum to zero");
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const long double target = (long double)(q)*total;
  long double cum = 0.0L;
  for (const auto& [v, w] : pairs) {
    cum += w;
    if (cum >= target) return v;
  }
  return pairs.back().first;
}

Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& at, double step) {
  Eigen::VectorXd grad(at.size());
  Eigen::VectorXd probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + step;
    const double up = f(probe);
    probe[i] = at[i] - step;
    const double down = f(probe);
    probe[i] = at[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

} // namespace pvstack::oracle
