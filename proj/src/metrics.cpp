#include "pvstack/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "pvstack/error.hpp"

namespace pvstack {

double nmae(const Eigen::Ref<const Eigen::VectorXd>& pred,
            const Eigen::Ref<const Eigen::VectorXd>& actual, double capacity) {
  require(pred.size() == actual.size(), Errc::LengthMismatch,
          "prediction and actual lengths differ");
  require(pred.size() >= 1, Errc::LengthMismatch, "empty series");
  require(capacity > 0.0, Errc::ZeroCapacity, "capacity must be positive");
  return 100.0 * (pred - actual).cwiseAbs().mean() / capacity;
}

ErrorReport daily_weekly_report(const std::vector<std::string>& models,
                                const Eigen::Ref<const Eigen::MatrixXd>& preds,
                                const Eigen::Ref<const Eigen::VectorXd>& actual,
                                const std::vector<std::int64_t>& timestamps,
                                const std::vector<CivilDate>& expected_days, double capacity,
                                DayConvention conv) {
  require(preds.cols() == Eigen::Index(models.size()), Errc::LengthMismatch,
          "prediction columns do not match model list");
  require(preds.rows() == actual.size() && std::size_t(preds.rows()) == timestamps.size(),
          Errc::LengthMismatch, "row counts disagree");
  require(!expected_days.empty(), Errc::InvalidArgument, "no days to report on");

  std::map<CivilDate, std::vector<Eigen::Index>> by_day;
  for (std::size_t i = 0; i < timestamps.size(); ++i)
    by_day[day_of(timestamps[i], conv)].push_back(Eigen::Index(i));

  for (const auto& [day, rows] : by_day) {
    const bool expected =
        std::find(expected_days.begin(), expected_days.end(), day) != expected_days.end();
    if (!expected)
      fail(Errc::IncompleteDay, "rows for unexpected day " + format_date(day));
  }

  ErrorReport report;
  report.days = expected_days;
  report.models = models;
  report.daily.resize(Eigen::Index(expected_days.size()), Eigen::Index(models.size()));
  for (std::size_t d = 0; d < expected_days.size(); ++d) {
    const auto it = by_day.find(expected_days[d]);
    const std::size_t count = it == by_day.end() ? 0 : it->second.size();
    if (count != 24)
      fail(Errc::IncompleteDay, format_date(expected_days[d]) + " has " + std::to_string(count) +
                                    " rows, expected 24");
    Eigen::VectorXd day_actual(24);
    Eigen::MatrixXd day_preds(24, preds.cols());
    for (int h = 0; h < 24; ++h) {
      day_actual[h] = actual[it->second[std::size_t(h)]];
      day_preds.row(h) = preds.row(it->second[std::size_t(h)]);
    }
    for (Eigen::Index m = 0; m < preds.cols(); ++m)
      report.daily(Eigen::Index(d), m) = nmae(day_preds.col(m), day_actual, capacity);
  }
  report.weekly = report.daily.colwise().mean();
  return report;
}

ErrorReport report_from_daily(std::vector<std::string> models, std::vector<CivilDate> days,
                              Eigen::MatrixXd daily) {
  require(daily.rows() == Eigen::Index(days.size()) &&
              daily.cols() == Eigen::Index(models.size()),
          Errc::LengthMismatch, "daily matrix shape mismatch");
  require(daily.rows() > 0, Errc::InvalidArgument, "no days to report on");
  ErrorReport report;
  report.models = std::move(models);
  report.days = std::move(days);
  report.weekly = daily.colwise().mean();
  report.daily = std::move(daily);
  return report;
}

std::string ErrorReport::to_csv() const {
  std::string out = "day";
  for (const std::string& m : models) out += "," + m;
  out += "\n";
  char buf[32];
  for (Eigen::Index d = 0; d < daily.rows(); ++d) {
    out += format_date(days[std::size_t(d)]);
    for (Eigen::Index m = 0; m < daily.cols(); ++m) {
      std::snprintf(buf, sizeof buf, ",%.6f", daily(d, m));
      out += buf;
    }
    out += "\n";
  }
  out += "weekly";
  for (Eigen::Index m = 0; m < weekly.size(); ++m) {
    std::snprintf(buf, sizeof buf, ",%.6f", weekly[m]);
    out += buf;
  }
  out += "\n";
  return out;
}

std::string ErrorReport::to_text() const {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-18s", "nMAE (%)");
  out += buf;
  for (const std::string& m : models) {
    std::snprintf(buf, sizeof buf, "%10s", m.c_str());
    out += buf;
  }
  out += "\n";
  for (Eigen::Index d = 0; d < daily.rows(); ++d) {
    std::snprintf(buf, sizeof buf, "%-18s", format_date(days[std::size_t(d)]).c_str());
    out += buf;
    for (Eigen::Index m = 0; m < daily.cols(); ++m) {
      std::snprintf(buf, sizeof buf, "%10.2f", daily(d, m));
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof buf, "%-18s", "Weekly");
  out += buf;
  for (Eigen::Index m = 0; m < weekly.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%10.2f", weekly[m]);
    out += buf;
  }
  out += "\n";
  return out;
}

} // namespace pvstack
