#include "pvstack/dataset.hpp"

#include "pvstack/error.hpp"

namespace pvstack {

void Dataset::check_consistent() const {
  require(X.rows() == y.size() && std::size_t(X.rows()) == timestamps.size(),
          Errc::InvalidArgument, "dataset row counts disagree");
  require(std::size_t(X.cols()) == feature_names.size(), Errc::InvalidArgument,
          "feature name count does not match matrix width");
}

Dataset Dataset::slice(const std::vector<Eigen::Index>& row_ids) const {
  Dataset out;
  out.feature_names = feature_names;
  out.normalized = normalized;
  out.X.resize(Eigen::Index(row_ids.size()), X.cols());
  out.y.resize(Eigen::Index(row_ids.size()));
  out.timestamps.reserve(row_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    out.X.row(Eigen::Index(i)) = X.row(row_ids[i]);
    out.y[Eigen::Index(i)] = y[row_ids[i]];
    out.timestamps.push_back(timestamps[std::size_t(row_ids[i])]);
  }
  return out;
}

} // namespace pvstack
