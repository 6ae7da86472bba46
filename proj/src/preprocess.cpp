#include "pvstack/preprocess.hpp"

#include <algorithm>
#include <set>

#include "pvstack/error.hpp"

namespace pvstack {

FeatureSpec FeatureSpec::make(std::vector<std::string> names) {
  require(!names.empty(), Errc::InvalidArgument, "feature spec must not be empty");
  std::set<std::string> seen;
  for (const std::string& n : names)
    require(seen.insert(n).second, Errc::InvalidArgument, "duplicate feature '" + n + "'");
  return FeatureSpec{std::move(names)};
}

Normalizer fit_normalizer(const Dataset& train) {
  train.check_consistent();
  if (train.rows() < 2) fail(Errc::EmptyDataset, "normalizer needs at least 2 rows");
  Normalizer norm;
  norm.feature_names = train.feature_names;
  norm.min = train.X.colwise().minCoeff();
  norm.max = train.X.colwise().maxCoeff();
  norm.degenerate.resize(std::size_t(train.cols()));
  for (Eigen::Index j = 0; j < train.cols(); ++j)
    norm.degenerate[std::size_t(j)] = (norm.max[j] == norm.min[j]);
  return norm;
}

namespace {

void check_features(const Normalizer& norm, const Dataset& data) {
  require(norm.feature_names == data.feature_names, Errc::FeatureMismatch,
          "dataset features do not match the normalizer");
}

} // namespace

Dataset transform(const Normalizer& norm, const Dataset& data) {
  data.check_consistent();
  check_features(norm, data);
  require(!data.normalized, Errc::AlreadyNormalized, "dataset is already normalized");
  Dataset out = data;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (norm.degenerate[std::size_t(j)]) {
      out.X.col(j).setZero();
    } else {
      out.X.col(j) = (out.X.col(j).array() - norm.min[j]) / (norm.max[j] - norm.min[j]);
    }
  }
  out.normalized = true;
  return out;
}

Dataset denormalize(const Normalizer& norm, const Dataset& data) {
  data.check_consistent();
  check_features(norm, data);
  require(data.normalized, Errc::InvalidArgument, "dataset is not normalized");
  Dataset out = data;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (norm.degenerate[std::size_t(j)]) {
      out.X.col(j).setConstant(norm.min[j]);
    } else {
      out.X.col(j) = out.X.col(j).array() * (norm.max[j] - norm.min[j]) + norm.min[j];
    }
  }
  out.normalized = false;
  return out;
}

Eigen::MatrixXd select_features(const std::vector<WeatherRecord>& records,
                                const FeatureSpec& spec) {
  Eigen::MatrixXd out(Eigen::Index(records.size()), Eigen::Index(spec.names.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = 0; j < spec.names.size(); ++j)
      out(Eigen::Index(i), Eigen::Index(j)) = records[i].var(spec.names[j]);
  return out;
}

Dataset select_columns(const Dataset& data, const FeatureSpec& spec) {
  data.check_consistent();
  Dataset out;
  out.y = data.y;
  out.timestamps = data.timestamps;
  out.normalized = data.normalized;
  out.feature_names = spec.names;
  out.X.resize(data.rows(), Eigen::Index(spec.names.size()));
  for (std::size_t j = 0; j < spec.names.size(); ++j) {
    const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), spec.names[j]);
    if (it == data.feature_names.end())
      fail(Errc::UnknownFeature, "no column named '" + spec.names[j] + "'");
    out.X.col(Eigen::Index(j)) = data.X.col(it - data.feature_names.begin());
  }
  return out;
}

} // namespace pvstack
