#include "pvstack/datetime.hpp"

#include <chrono>
#include <cstdio>

#include "pvstack/error.hpp"

namespace pvstack {

namespace {

namespace chr = std::chrono;

std::int64_t days_to_epoch(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) fail(Errc::MalformedRow, "invalid calendar date " + std::to_string(year) + "-" +
                                              std::to_string(month) + "-" + std::to_string(day));
  return chr::sys_days(ymd).time_since_epoch().count() * kSecondsPerDay;
}

} // namespace

std::int64_t civil_to_epoch(int year, unsigned month, unsigned day, unsigned hour,
                            unsigned minute) {
  if (hour > 24 || minute > 59)
    fail(Errc::MalformedRow, "invalid time of day " + std::to_string(hour) + ":" +
                                 std::to_string(minute));
  return days_to_epoch(year, month, day) + std::int64_t(hour) * kSecondsPerHour +
         std::int64_t(minute) * 60;
}

std::int64_t date_to_epoch(const CivilDate& d) { return days_to_epoch(d.year, d.month, d.day); }

CivilDate epoch_to_date(std::int64_t ts) {
  std::int64_t day_count = ts / kSecondsPerDay;
  if (ts < 0 && ts % kSecondsPerDay != 0) --day_count;
  chr::year_month_day ymd{chr::sys_days{chr::days{day_count}}};
  return CivilDate{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
}

std::int64_t parse_timestamp(const std::string& s) {
  int y = 0;
  unsigned mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
  // ISO-8601 with 'T' or space separator.
  if (s.size() >= 10 && s[4] == '-') {
    int n = std::sscanf(s.c_str(), "%4d-%2u-%2u%*1[T ]%2u:%2u:%2u", &y, &mo, &d, &hh, &mi, &ss);
    if (n == 3) return days_to_epoch(y, mo, d);  // date-only: midnight
    if (n >= 5) {
      if (ss != 0) fail(Errc::MalformedRow, "sub-minute timestamp: " + s);
      return civil_to_epoch(y, mo, d, hh, mi);
    }
    fail(Errc::MalformedRow, "unparseable timestamp: " + s);
  }
  // GEFCom "YYYYMMDD H:MM".
  if (std::sscanf(s.c_str(), "%4d%2u%2u %2u:%2u", &y, &mo, &d, &hh, &mi) == 5) {
    if (hh == 24) return days_to_epoch(y, mo, d) + kSecondsPerDay + std::int64_t(mi) * 60;
    return civil_to_epoch(y, mo, d, hh, mi);
  }
  fail(Errc::MalformedRow, "unparseable timestamp: " + s);
}

CivilDate parse_date(const std::string& s) {
  int y = 0;
  unsigned mo = 0, d = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2u", &y, &mo, &d) != 3)
    fail(Errc::MalformedRow, "unparseable date: " + s);
  CivilDate out{y, mo, d};
  date_to_epoch(out);  // validates
  return out;
}

std::string format_timestamp(std::int64_t ts) {
  CivilDate d = epoch_to_date(ts);
  std::int64_t rem = ts - date_to_epoch(d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", d.year, d.month, d.day,
                int(rem / kSecondsPerHour), int(rem % kSecondsPerHour) / 60);
  return buf;
}

std::string format_date(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
  return buf;
}

int hour_of_day(std::int64_t ts) {
  std::int64_t rem = ts % kSecondsPerDay;
  if (rem < 0) rem += kSecondsPerDay;
  return int(rem / kSecondsPerHour);
}

} // namespace pvstack
