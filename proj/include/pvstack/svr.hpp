#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pvstack/dataset.hpp"

namespace pvstack {

struct SvrConfig {
  double nu = 0.5;
  double gamma = 1.25;  // RBF width: K(x, x') = exp(-gamma * ||x - x'||^2)
  double c = 1.0;
  double tol = 1e-3;  // KKT violation threshold
  long max_iter = 100000;
  std::size_t cache_bytes = 256ull << 20;
  bool track_objective = false;  // record the dual objective per iteration

  void validate() const;
  bool operator==(const SvrConfig&) const = default;
};

struct SvrDiagnostics {
  long iterations = 0;
  double kkt_violation = 0.0;
  bool converged = false;
  int n_train = 0;
  double dual_objective = 0.0;
  std::vector<double> objective_trace;  // only when track_objective
};

/// nu-SVR with Gaussian kernel, solved by sequential minimal optimization on
/// the dual. Convention: per-variable box 0 <= alpha, alpha* <= c/n with
/// budget sum(alpha + alpha*) = c * nu; the tube width epsilon is a solver
/// output, not a parameter.
class SvrModel {
public:
  static SvrModel fit(const Dataset& train, const SvrConfig& config);

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& queries) const;

  const Eigen::MatrixXd& support_vectors() const { return sv_; }
  const Eigen::VectorXd& dual_coeffs() const { return coeffs_; }
  double bias() const { return bias_; }
  double epsilon() const { return epsilon_; }
  const SvrConfig& config() const { return config_; }
  const SvrDiagnostics& diagnostics() const { return diag_; }
  static constexpr const char* kConvention = "box=c/n,budget=c*nu";

  /// Full dual solution (one theta per training row), used by diagnostics and
  /// the oracle comparisons.
  const Eigen::VectorXd& theta() const { return theta_; }

  SvrModel() = default;
  SvrModel(Eigen::MatrixXd sv, Eigen::VectorXd coeffs, double bias, double epsilon,
           SvrConfig config, SvrDiagnostics diag, Eigen::VectorXd theta);

private:
  Eigen::MatrixXd sv_;       // support vectors, one per row
  Eigen::VectorXd coeffs_;   // alpha_i - alpha_i^* per support vector
  double bias_ = 0.0;
  double epsilon_ = 0.0;
  SvrConfig config_;
  SvrDiagnostics diag_;
  Eigen::VectorXd theta_;
};

/// Gram matrix of the Gaussian kernel (symmetric, unit diagonal).
Eigen::MatrixXd rbf_gram(const Eigen::Ref<const Eigen::MatrixXd>& X, double gamma);

} // namespace pvstack
