#pragma once

#include <cstdint>
#include <string>

namespace pvstack {

// Timestamps are UTC-naive seconds since 1970-01-01 00:00.
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const CivilDate&) const = default;
};

std::int64_t civil_to_epoch(int year, unsigned month, unsigned day, unsigned hour = 0,
                            unsigned minute = 0);
std::int64_t date_to_epoch(const CivilDate& d);
CivilDate epoch_to_date(std::int64_t ts);

/// Accepts GEFCom "YYYYMMDD H:MM" (hour 0..24, 24:00 normalized to next-day 00:00)
/// and ISO-8601 "YYYY-MM-DDTHH:MM[:SS]".
std::int64_t parse_timestamp(const std::string& s);

/// "YYYY-MM-DD"
CivilDate parse_date(const std::string& s);

std::string format_timestamp(std::int64_t ts);  // ISO, minute resolution
std::string format_date(const CivilDate& d);

inline bool on_hour(std::int64_t ts) { return ts % kSecondsPerHour == 0; }
int hour_of_day(std::int64_t ts);  // 0..23

} // namespace pvstack
