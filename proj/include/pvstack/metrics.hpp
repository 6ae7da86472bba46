#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pvstack/csv.hpp"
#include "pvstack/datetime.hpp"

namespace pvstack {

/// Normalized mean absolute error in percent:
/// 100 * mean(|pred - actual|) / capacity.
double nmae(const Eigen::Ref<const Eigen::VectorXd>& pred,
            const Eigen::Ref<const Eigen::VectorXd>& actual, double capacity);

/// Daily and weekly nMAE per model. `weekly` is the arithmetic mean of the
/// daily values.
struct ErrorReport {
  std::vector<CivilDate> days;
  std::vector<std::string> models;
  Eigen::MatrixXd daily;   // days x models, percent
  Eigen::VectorXd weekly;  // per model, percent

  std::string to_csv() const;
  std::string to_text() const;  // aligned table, two decimals
};

/// Aggregates hourly predictions into the report. Timestamps must cover the
/// expected days exactly, 24 rows each.
ErrorReport daily_weekly_report(const std::vector<std::string>& models,
                                const Eigen::Ref<const Eigen::MatrixXd>& preds,  // n x models
                                const Eigen::Ref<const Eigen::VectorXd>& actual,
                                const std::vector<std::int64_t>& timestamps,
                                const std::vector<CivilDate>& expected_days, double capacity,
                                DayConvention conv = DayConvention::HourEnding);

/// Builds a report from per-day values directly (weekly row = column means).
ErrorReport report_from_daily(std::vector<std::string> models, std::vector<CivilDate> days,
                              Eigen::MatrixXd daily);

} // namespace pvstack
