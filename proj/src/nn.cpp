#include "pvstack/nn.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "pvstack/error.hpp"
#include "pvstack/rng.hpp"

namespace pvstack {

void NnTrainConfig::validate() const {
  require(hidden >= 1, Errc::ConfigError, "hidden neuron count must be positive");
  require(max_epochs >= 1, Errc::ConfigError, "max_epochs must be positive");
  require(mu_init > 0 && mu_inc > 1 && mu_dec > 0 && mu_dec < 1 && mu_max > mu_init,
          Errc::ConfigError, "invalid damping schedule");
  require(grad_tol > 0, Errc::ConfigError, "grad_tol must be positive");
  require(alpha_init >= 0 && beta_init > 0, Errc::ConfigError, "invalid hyperparameter init");
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

} // namespace

Eigen::VectorXd NnParams::pack() const {
  const Eigen::Index h = w1.size();
  Eigen::VectorXd v(3 * h + 1);
  v.segment(0, h) = w1;
  v.segment(h, h) = b1;
  v.segment(2 * h, h) = w2;
  v[3 * h] = b2;
  return v;
}

NnParams NnParams::unpack(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index h = (v.size() - 1) / 3;
  NnParams p;
  p.w1 = v.segment(0, h);
  p.b1 = v.segment(h, h);
  p.w2 = v.segment(2 * h, h);
  p.b2 = v[3 * h];
  return p;
}

double nn_forward(const NnParams& p, double x) {
  double out = p.b2;
  for (Eigen::Index j = 0; j < p.w1.size(); ++j)
    out += p.w2[j] * sigmoid(p.w1[j] * x + p.b1[j]);
  return out;
}

void nn_jacobian(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 Eigen::MatrixXd& jac, Eigen::VectorXd& residual) {
  const Eigen::Index n = x.size();
  const Eigen::Index h = p.w1.size();
  jac.resize(n, 3 * h + 1);
  residual.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = p.b2;
    for (Eigen::Index j = 0; j < h; ++j) {
      const double s = sigmoid(p.w1[j] * x[i] + p.b1[j]);
      const double sd = s * (1.0 - s);
      f += p.w2[j] * s;
      jac(i, j) = p.w2[j] * sd * x[i];   // d f / d w1_j
      jac(i, h + j) = p.w2[j] * sd;      // d f / d b1_j
      jac(i, 2 * h + j) = s;             // d f / d w2_j
    }
    jac(i, 3 * h) = 1.0;                 // d f / d b2
    residual[i] = f - y[i];
  }
}

double nn_data_error(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double sse = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double e = nn_forward(p, x[i]) - y[i];
    sse += e * e;
  }
  return sse;
}

double nn_objective(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    double alpha, double beta) {
  return beta * nn_data_error(p, x, y) + alpha * p.pack().squaredNorm();
}

Eigen::VectorXd nn_gradient(const NnParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            double alpha, double beta) {
  Eigen::MatrixXd jac;
  Eigen::VectorXd residual;
  nn_jacobian(p, x, y, jac, residual);
  return 2.0 * beta * (jac.transpose() * residual) + 2.0 * alpha * p.pack();
}

namespace {

/// Solve A v = rhs by Cholesky, adding diagonal jitter on failure.
/// Returns false when even the jittered system will not factor.
bool solve_spd(Eigen::MatrixXd A, const Eigen::VectorXd& rhs, Eigen::VectorXd& out) {
  double jitter = 1e-10;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      out = llt.solve(rhs);
      if (out.allFinite()) return true;
    }
    A.diagonal().array() += jitter;
    jitter *= 10.0;
  }
  return false;
}

bool trace_inverse(const Eigen::MatrixXd& A, double& tr) {
  double jitter = 1e-10;
  Eigen::MatrixXd M = A;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd inv =
          llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
      tr = inv.trace();
      if (std::isfinite(tr)) return true;
    }
    M.diagonal().array() += jitter;
    jitter *= 10.0;
  }
  return false;
}

struct TrainResult {
  NnParams params;
  double alpha, beta, gamma_eff;
  NnDiagnostics diag;
};

TrainResult train_lm(NnParams params, double alpha, double beta, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y, const NnTrainConfig& cfg, bool warm_hyperparams) {
  const int n_w = params.count();
  const Eigen::Index n = x.size();
  double mu = cfg.mu_init;
  double gamma_eff = double(n_w);
  NnDiagnostics diag;

  Eigen::MatrixXd jac;
  Eigen::VectorXd residual;
  int epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    nn_jacobian(params, x, y, jac, residual);
    Eigen::VectorXd w = params.pack();
    double e_d = residual.squaredNorm();
    double e_w = w.squaredNorm();
    require(std::isfinite(e_d) && std::isfinite(e_w), Errc::NonFinite,
            "objective became non-finite");
    const Eigen::MatrixXd jtj = jac.transpose() * jac;

    // Effective number of parameters under the current hyperparameters,
    // from the Gauss-Newton Hessian of F.
    Eigen::MatrixXd hess =
        2.0 * beta * jtj + 2.0 * alpha * Eigen::MatrixXd::Identity(n_w, n_w);
    double tr_inv = 0.0;
    if (!trace_inverse(hess, tr_inv)) {
      diag.hessian_failure = true;
      break;
    }
    gamma_eff = double(n_w) - alpha * tr_inv;

    if (cfg.update_hyperparams && (epoch > 0 || warm_hyperparams)) {
      alpha = std::min(gamma_eff / (2.0 * std::max(e_w, 1e-30)), 1e12);
      beta = std::min(std::max(double(n) - gamma_eff, 1e-6) /
                          (2.0 * std::max(e_d, 1e-30)),
                      1e12);
      hess = 2.0 * beta * jtj + 2.0 * alpha * Eigen::MatrixXd::Identity(n_w, n_w);
    }
    if (cfg.track_history) diag.gamma_history.push_back(gamma_eff);

    const Eigen::VectorXd grad = 2.0 * beta * (jac.transpose() * residual) + 2.0 * alpha * w;
    if (grad.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
      diag.gradient_converged = true;
      break;
    }

    const double f_current = beta * e_d + alpha * e_w;
    bool accepted = false;
    while (mu <= cfg.mu_max) {
      Eigen::MatrixXd damped = hess;
      damped.diagonal().array() += mu;
      Eigen::VectorXd step;
      if (!solve_spd(damped, -grad, step)) {
        diag.hessian_failure = true;
        break;
      }
      const NnParams trial = NnParams::unpack(w + step);
      const double f_trial = beta * nn_data_error(trial, x, y) + alpha * trial.pack().squaredNorm();
      if (std::isfinite(f_trial) && f_trial < f_current) {
        params = trial;
        mu = std::max(mu * cfg.mu_dec, 1e-20);
        if (cfg.track_history) diag.step_objectives.emplace_back(f_current, f_trial);
        accepted = true;
        break;
      }
      mu *= cfg.mu_inc;
    }
    if (diag.hessian_failure) break;
    if (!accepted) {
      diag.damping_overflow = true;
      break;
    }
  }

  diag.epochs = epoch;
  diag.final_sse = nn_data_error(params, x, y);
  diag.final_objective = beta * diag.final_sse + alpha * params.pack().squaredNorm();
  return TrainResult{std::move(params), alpha, beta, gamma_eff, std::move(diag)};
}

} // namespace

NnModel::NnModel(NnParams params, double alpha, double beta, double gamma_eff, std::uint64_t seed,
                 NnTrainConfig config, NnDiagnostics diag)
    : params_(std::move(params)), alpha_(alpha), beta_(beta), gamma_eff_(gamma_eff), seed_(seed),
      config_(config), diag_(std::move(diag)) {
  require(params_.pack().allFinite(), Errc::NonFinite, "model weights are non-finite");
}

NnModel NnModel::fit(const Dataset& train, const NnTrainConfig& config) {
  config.validate();
  train.check_consistent();
  require(train.cols() == 1, Errc::FeatureMismatch,
          "the network takes exactly one input feature");
  require(train.normalized, Errc::InvalidArgument, "network expects normalized training data");
  require(train.rows() >= 1, Errc::EmptyDataset, "empty training set");
  require(train.X.allFinite() && train.y.allFinite(), Errc::NonFinite,
          "training data has non-finite entries");

  Rng rng(config.rng_seed);
  NnParams init;
  init.w1.resize(config.hidden);
  init.b1.resize(config.hidden);
  init.w2.resize(config.hidden);
  Eigen::VectorXd packed(3 * config.hidden + 1);
  for (Eigen::Index i = 0; i < packed.size(); ++i) packed[i] = rng.uniform(-0.5, 0.5);
  init = NnParams::unpack(packed);

  TrainResult res = train_lm(std::move(init), config.alpha_init, config.beta_init, train.X.col(0),
                             train.y, config, /*warm_hyperparams=*/false);
  return NnModel(std::move(res.params), res.alpha, res.beta, res.gamma_eff, config.rng_seed,
                 config, std::move(res.diag));
}

NnModel NnModel::refit(const Dataset& window) const {
  window.check_consistent();
  require(window.rows() >= 1, Errc::EmptyDataset, "refit window is empty");
  require(window.cols() == 1, Errc::FeatureMismatch,
          "the network takes exactly one input feature");
  require(window.normalized, Errc::InvalidArgument, "network expects normalized data");

  TrainResult res = train_lm(params_, alpha_, beta_, window.X.col(0), window.y, config_,
                             /*warm_hyperparams=*/config_.update_hyperparams);
  return NnModel(std::move(res.params), res.alpha, res.beta, res.gamma_eff, seed_, config_,
                 std::move(res.diag));
}

Eigen::VectorXd NnModel::predict_batch(const Eigen::Ref<const Eigen::VectorXd>& xs) const {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = nn_forward(params_, xs[i]);
  return out;
}

} // namespace pvstack
