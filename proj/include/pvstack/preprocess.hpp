#pragma once

#include <string>
#include <vector>

#include "pvstack/csv.hpp"
#include "pvstack/dataset.hpp"

namespace pvstack {

/// The five variables used by the member models, in canonical order.
inline const std::vector<std::string> kMemberFeatures = {"TCC", "SSRD", "STRD", "TSR", "TP"};
/// The network input: irradiance only.
inline const std::vector<std::string> kNnFeatures = {"SSRD"};

struct FeatureSpec {
  std::vector<std::string> names;

  /// Non-empty, duplicate-free.
  static FeatureSpec make(std::vector<std::string> names);
};

/// Per-feature min/max learned from training data. Degenerate features
/// (max == min) map to 0 under transform.
struct Normalizer {
  std::vector<std::string> feature_names;
  Eigen::VectorXd min;
  Eigen::VectorXd max;
  std::vector<bool> degenerate;
};

Normalizer fit_normalizer(const Dataset& train);

/// x' = (x - min) / (max - min). Values outside the training range are not
/// clipped. Transforming an already-normalized dataset is an error.
Dataset transform(const Normalizer& norm, const Dataset& data);

/// Inverse of transform for non-degenerate features.
Dataset denormalize(const Normalizer& norm, const Dataset& data);

/// Extracts the named variables as a matrix, columns in spec order.
Eigen::MatrixXd select_features(const std::vector<WeatherRecord>& records,
                                const FeatureSpec& spec);

/// Column subset of a dataset, in spec order.
Dataset select_columns(const Dataset& data, const FeatureSpec& spec);

} // namespace pvstack
