#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>

namespace pvstack::oracle {

// Brute-force reference implementations, kept deliberately independent of the
// main solvers so the two can be compared on small instances.

struct SvrQpResult {
  Eigen::VectorXd theta;
  double bias = 0.0;
  double epsilon = 0.0;
  double objective = 0.0;  // dual, maximization form
};

/// Dense nu-SVR dual solved by accelerated projected gradient on
/// {theta : sum theta = 0, |theta_i| <= c/n, sum |theta_i| <= c * nu},
/// run to high accuracy. Bias/epsilon recovered from the KKT conditions.
SvrQpResult svr_qp_reference(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double nu, double gamma,
                             double c, int max_iter = 4000);

double svr_qp_predict(const SvrQpResult& sol, const Eigen::Ref<const Eigen::MatrixXd>& X_train,
                      double gamma, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Exact projection onto the oracle's feasible polytope (exposed for tests).
Eigen::VectorXd project_svr_dual(const Eigen::Ref<const Eigen::VectorXd>& z, double box,
                                 double l1_budget);

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double child_sse = 0.0;
};

/// Exhaustive MSE split search over every feature and every midpoint between
/// consecutive distinct values; naive two-pass SSE per candidate. Ties resolve
/// to the lowest feature index, then the lowest threshold.
SplitChoice exhaustive_best_split(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& y,
                                  std::span<const int> rows, int min_samples_leaf);

/// Ridge-regularized normal equations (P'P + ridge I) w = P'y.
Eigen::VectorXd normal_equations_ridge(const Eigen::Ref<const Eigen::MatrixXd>& P,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       double ridge = 1e-12);

/// Direct CDF walk with long-double accumulation.
double weighted_quantile_reference(std::span<const double> values,
                                   std::span<const double> weights, double q);

/// Central-difference gradient of a scalar function.
Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& at, double step = 1e-6);

} // namespace pvstack::oracle
