#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pvstack/dataset.hpp"
#include "pvstack/datetime.hpp"

namespace pvstack {

/// One hourly row of meteorological values. `vars` preserves CSV column order
/// and always holds exactly twelve finite values.
struct WeatherRecord {
  int zone_id = 0;
  std::int64_t timestamp = 0;
  std::vector<std::pair<std::string, double>> vars;

  double var(const std::string& name) const;  // UnknownFeature if absent
};

struct PowerRecord {
  int zone_id = 0;
  std::int64_t timestamp = 0;
  double power = 0.0;  // [0, 1], capacity-normalized
};

inline constexpr int kWeatherVarCount = 12;

struct LoadOptions {
  /// Replace cumulative fields by hourly differences. The first hour of each
  /// forecast run (hour of day == run_start_hour) is kept as-is.
  bool deaccumulate = false;
  std::vector<std::string> deaccumulate_fields = {"VAR169", "VAR175", "VAR178", "VAR228"};
  int run_start_hour = 1;
};

/// Reads `ZONEID,TIMESTAMP,<12 vars>` rows, keeping the requested zone.
/// Rows come back sorted by timestamp, gap-free and duplicate-free.
std::vector<WeatherRecord> load_weather(const std::string& path, int zone,
                                        const LoadOptions& opts = {});

/// Reads `ZONEID,TIMESTAMP,POWER` rows for the requested zone.
std::vector<PowerRecord> load_power(const std::string& path, int zone);

/// Inner join on timestamp; features are the weather variables in CSV order.
Dataset align(const std::vector<WeatherRecord>& weather, const std::vector<PowerRecord>& power);

/// Maps an hourly timestamp to the calendar day it belongs to.
/// HourEnding (GEFCom convention): day D covers (D 00:00, D+1 00:00].
/// HourBeginning: day D covers [D 00:00, D+1 00:00).
enum class DayConvention { HourEnding, HourBeginning };

CivilDate day_of(std::int64_t ts, DayConvention conv);

struct SplitSpec {
  std::int64_t train_begin = 0, train_end = 0;            // [begin, end)
  std::int64_t validation_begin = 0, validation_end = 0;  // [begin, end)
  std::vector<CivilDate> test_days;
  DayConvention day_convention = DayConvention::HourEnding;

  /// Validating factory: ranges must be well-formed, disjoint and ordered
  /// train < validation < test.
  static SplitSpec make(std::int64_t train_begin, std::int64_t train_end,
                        std::int64_t validation_begin, std::int64_t validation_end,
                        std::vector<CivilDate> test_days,
                        DayConvention conv = DayConvention::HourEnding);

  /// Hour range [first, last] covered by a test day under the convention.
  std::pair<std::int64_t, std::int64_t> test_day_hours(const CivilDate& day) const;
};

struct SplitResult {
  Dataset train, validation, test;
};

/// Partitions rows by the spec. Every spec range must be fully covered by the
/// dataset (RangeNotCovered otherwise); each test day contributes exactly 24 rows.
SplitResult split(const Dataset& dataset, const SplitSpec& spec);

} // namespace pvstack
