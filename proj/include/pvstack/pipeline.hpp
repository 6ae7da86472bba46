#pragma once

#include <string>
#include <vector>

#include "pvstack/config.hpp"
#include "pvstack/ensemble.hpp"
#include "pvstack/knn.hpp"
#include "pvstack/metrics.hpp"
#include "pvstack/nn.hpp"
#include "pvstack/preprocess.hpp"
#include "pvstack/qrf.hpp"
#include "pvstack/svr.hpp"

namespace pvstack {

/// Unnormalized feature datasets for each pipeline stage; the member models
/// and the network use different feature sets.
struct PipelineData {
  Dataset member_train, member_val, member_test;
  Dataset nn_train, nn_val, nn_test;
};

PipelineData prepare_data(const RunConfig& config);

struct ModelSet {
  Normalizer member_norm, nn_norm;
  KnnModel knn;
  QrfModel qrf;
  SvrModel svr;
  NnModel nn;
  EnsembleWeights ens;
};

/// Fits normalizers on the training block, all four base models, and the
/// stacking weights on the validation block.
ModelSet train_models(const RunConfig& config, const PipelineData& data);

void save_models(const RunConfig& config, const ModelSet& models);
ModelSet load_models(const RunConfig& config);

struct PredictionTable {
  std::vector<std::int64_t> timestamps;
  Eigen::VectorXd actual;
  std::vector<std::string> model_names;  // nn, knn, qrf, svr, ens
  Eigen::MatrixXd preds;                 // n x models

  Eigen::VectorXd column(const std::string& model) const;
  std::string to_csv() const;  // header timestamp,actual,nn,knn,qrf,svr,ens
  static PredictionTable from_csv(const std::string& text);
};

PredictionTable predict_test(const RunConfig& config, const ModelSet& models,
                             const PipelineData& data);

/// Daily/weekly nMAE for the configured report models.
ErrorReport make_report(const RunConfig& config, const PredictionTable& table);

/// Paths of the artifacts a trained run writes into config.output_dir.
std::vector<std::string> artifact_paths(const RunConfig& config);

} // namespace pvstack
