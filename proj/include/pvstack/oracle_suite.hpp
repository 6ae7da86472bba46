#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pvstack {

/// One oracle-vs-implementation property check over randomized instances.
struct SuiteResult {
  std::string name;
  bool pass = false;
  double max_deviation = 0.0;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  int svr_instances = 100;
  int qrf_instances = 50;
  int ensemble_instances = 100;
  int quantile_instances = 200;
  /// Debug: force tolerances to zero so failures (and the deviations behind
  /// them) are reported.
  bool corrupt_tolerance = false;
};

/// nu-SVR SMO vs dense projected-gradient QP: objective, predictions at probe
/// points, and the nu-property on every instance.
std::vector<SuiteResult> run_svr_oracle_suite(const SuiteOptions& opts);

/// Single-tree, identity-bootstrap forests vs exhaustive split search.
std::vector<SuiteResult> run_qrf_oracle_suite(const SuiteOptions& opts);

/// Pseudo-inverse stacking weights vs ridge-regularized normal equations,
/// plus SSE dominance over single members.
std::vector<SuiteResult> run_ensemble_oracle_suite(const SuiteOptions& opts);

/// weighted_quantile vs an independent CDF walk.
std::vector<SuiteResult> run_quantile_oracle_suite(const SuiteOptions& opts);

std::vector<SuiteResult> run_all_oracle_suites(const SuiteOptions& opts);

} // namespace pvstack
