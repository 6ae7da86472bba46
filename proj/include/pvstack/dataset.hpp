#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace pvstack {

/// Aligned feature matrix, target power vector and per-row timestamps.
/// `normalized` marks data that has been through a Normalizer; model fits
/// that require normalized inputs check it.
struct Dataset {
  Eigen::MatrixXd X;                      // n x p
  Eigen::VectorXd y;                      // n
  std::vector<std::int64_t> timestamps;   // n
  std::vector<std::string> feature_names; // p
  bool normalized = false;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }

  void check_consistent() const;  // throws InvalidArgument on shape mismatch
  Dataset slice(const std::vector<Eigen::Index>& row_ids) const;
};

} // namespace pvstack
