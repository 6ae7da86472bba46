#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pvstack/dataset.hpp"

namespace pvstack {

/// Linear stacking weights fit on out-of-sample member predictions.
struct EnsembleWeights {
  std::vector<std::string> member_names;
  Eigen::VectorXd w;  // one per member, plus trailing intercept when enabled
  bool intercept = false;
  bool clip = true;  // clamp combined prediction to [0, 1]
  // fit diagnostics
  int rank = 0;
  double residual_sq = 0.0;
};

/// Minimum-norm least-squares solution w = pinv(P) y. Rank deficiency is not
/// an error; the rank is reported in the result.
EnsembleWeights fit_weights(const Eigen::Ref<const Eigen::MatrixXd>& member_preds,
                            const Eigen::Ref<const Eigen::VectorXd>& actual,
                            std::vector<std::string> member_names, bool intercept = false,
                            bool clip = true);

double ensemble_predict(const EnsembleWeights& weights,
                        const Eigen::Ref<const Eigen::VectorXd>& member_preds);

Eigen::VectorXd ensemble_predict_batch(const EnsembleWeights& weights,
                                       const Eigen::Ref<const Eigen::MatrixXd>& member_preds);

} // namespace pvstack
