#include "pvstack/ensemble.hpp"

#include <Eigen/QR>
#include <algorithm>

#include "pvstack/error.hpp"

namespace pvstack {

EnsembleWeights fit_weights(const Eigen::Ref<const Eigen::MatrixXd>& member_preds,
                            const Eigen::Ref<const Eigen::VectorXd>& actual,
                            std::vector<std::string> member_names, bool intercept, bool clip) {
  require(member_preds.cols() == Eigen::Index(member_names.size()), Errc::MemberMismatch,
          "prediction columns do not match member names");
  require(member_preds.rows() == actual.size(), Errc::LengthMismatch,
          "prediction rows do not match target length");
  require(member_preds.allFinite() && actual.allFinite(), Errc::NonFinite,
          "non-finite fit inputs");

  Eigen::MatrixXd design = member_preds;
  if (intercept) {
    design.conservativeResize(Eigen::NoChange, design.cols() + 1);
    design.col(design.cols() - 1).setOnes();
  }
  require(design.rows() >= design.cols(), Errc::TooFewSamples,
          "need at least as many validation rows as members");

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  EnsembleWeights out;
  out.member_names = std::move(member_names);
  out.w = cod.solve(actual);  // minimum-norm least-squares solution
  out.intercept = intercept;
  out.clip = clip;
  out.rank = int(cod.rank());
  out.residual_sq = (design * out.w - actual).squaredNorm();
  return out;
}

double ensemble_predict(const EnsembleWeights& weights,
                        const Eigen::Ref<const Eigen::VectorXd>& member_preds) {
  const Eigen::Index k = Eigen::Index(weights.member_names.size());
  require(member_preds.size() == k, Errc::MemberMismatch,
          "expected " + std::to_string(k) + " member predictions, got " +
              std::to_string(member_preds.size()));
  double v = weights.w.head(k).dot(member_preds);
  if (weights.intercept) v += weights.w[k];
  if (weights.clip) v = std::clamp(v, 0.0, 1.0);
  return v;
}

Eigen::VectorXd ensemble_predict_batch(const EnsembleWeights& weights,
                                       const Eigen::Ref<const Eigen::MatrixXd>& member_preds) {
  Eigen::VectorXd out(member_preds.rows());
  for (Eigen::Index i = 0; i < member_preds.rows(); ++i)
    out[i] = ensemble_predict(weights, member_preds.row(i).transpose());
  return out;
}

} // namespace pvstack
