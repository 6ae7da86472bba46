#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "pvstack/dataset.hpp"

namespace pvstack {

struct NnTrainConfig {
  int hidden = 3;
  int max_epochs = 300;
  double mu_init = 0.005;  // Levenberg-Marquardt damping schedule
  double mu_inc = 10.0;
  double mu_dec = 0.1;
  double mu_max = 1e10;
  double grad_tol = 1e-7;
  std::uint64_t rng_seed = 0;
  double alpha_init = 0.0;  // weight-decay precision before the first evidence update
  double beta_init = 1.0;   // noise precision
  bool update_hyperparams = true;
  bool track_history = false;

  void validate() const;
  bool operator==(const NnTrainConfig&) const = default;
};

/// Weights of the 1-h-1 network: out = w2 . sigmoid(w1 * x + b1) + b2.
struct NnParams {
  Eigen::VectorXd w1, b1, w2;
  double b2 = 0.0;

  int count() const { return int(3 * w1.size() + 1); }
  Eigen::VectorXd pack() const;
  static NnParams unpack(const Eigen::Ref<const Eigen::VectorXd>& v);
};

double nn_forward(const NnParams& p, double x);

/// Sum of squared errors E_D and its Jacobian rows (d f(x_i) / d w).
double nn_data_error(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Regularized objective F = beta * E_D + alpha * E_W
/// (E_D = sum of squared errors, E_W = sum of squared weights).
double nn_objective(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    double alpha, double beta);

/// Analytic gradient of F with respect to the packed parameter vector.
Eigen::VectorXd nn_gradient(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            double alpha, double beta);

/// Jacobian J(i, j) = d f(x_i) / d w_j and residuals e_i = f(x_i) - y_i.
void nn_jacobian(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 Eigen::MatrixXd& jac, Eigen::VectorXd& residual);

struct NnDiagnostics {
  int epochs = 0;
  bool gradient_converged = false;
  bool damping_overflow = false;
  bool hessian_failure = false;  // last stable iterate returned
  double final_objective = 0.0;
  double final_sse = 0.0;
  std::vector<double> gamma_history;  // effective parameter count per epoch
  std::vector<std::pair<double, double>> step_objectives;  // (before, after) per accepted step
};

/// Single-hidden-layer sigmoid network trained by Levenberg-Marquardt with
/// Bayesian re-estimation of (alpha, beta) each epoch.
class NnModel {
public:
  static NnModel fit(const Dataset& train, const NnTrainConfig& config);

  /// Warm-started re-fit on a new window; architecture and current
  /// hyperparameters carry over.
  NnModel refit(const Dataset& window) const;

  double predict(double x) const { return nn_forward(params_, x); }
  Eigen::VectorXd predict_batch(const Eigen::Ref<const Eigen::VectorXd>& xs) const;

  const NnParams& params() const { return params_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma_eff() const { return gamma_eff_; }
  std::uint64_t rng_seed() const { return seed_; }
  const NnDiagnostics& diagnostics() const { return diag_; }
  const NnTrainConfig& config() const { return config_; }

  NnModel() = default;
  NnModel(NnParams params, double alpha, double beta, double gamma_eff, std::uint64_t seed,
          NnTrainConfig config, NnDiagnostics diag = {});

private:
  NnParams params_;
  double alpha_ = 0.0, beta_ = 1.0, gamma_eff_ = 0.0;
  std::uint64_t seed_ = 0;
  NnTrainConfig config_;
  NnDiagnostics diag_;
};

} // namespace pvstack
