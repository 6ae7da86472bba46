#include "pvstack/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "pvstack/error.hpp"

namespace pvstack {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string upper(std::string s) {
  for (char& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  const std::string t = trim(s);
  if (t.empty()) fail(Errc::MalformedRow, path + ":" + std::to_string(line_no) + ": empty field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    fail(Errc::MalformedRow,
         path + ":" + std::to_string(line_no) + ": non-numeric field '" + t + "'");
  if (!std::isfinite(v))
    fail(Errc::MalformedRow,
         path + ":" + std::to_string(line_no) + ": non-finite field '" + t + "'");
  return v;
}

int parse_zone(const std::string& s, const std::string& path, std::size_t line_no) {
  const double v = parse_double(s, path, line_no);
  const int z = int(v);
  if (double(z) != v)
    fail(Errc::MalformedRow, path + ":" + std::to_string(line_no) + ": non-integer zone '" + s + "'");
  return z;
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::MalformedRow, "cannot open " + path);
  return in;
}

template <typename Rec>
void check_sorted_series(std::vector<Rec>& rows, const std::string& path) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Rec& a, const Rec& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].timestamp == rows[i - 1].timestamp)
      fail(Errc::MalformedRow,
           path + ": duplicate timestamp " + format_timestamp(rows[i].timestamp));
    if (rows[i].timestamp - rows[i - 1].timestamp != kSecondsPerHour)
      fail(Errc::GapInSeries, path + ": missing hour(s) between " +
                                  format_timestamp(rows[i - 1].timestamp) + " and " +
                                  format_timestamp(rows[i].timestamp));
  }
}

void deaccumulate(std::vector<WeatherRecord>& rows, const LoadOptions& opts) {
  std::vector<std::size_t> cols;
  if (rows.empty()) return;
  for (std::size_t j = 0; j < rows.front().vars.size(); ++j) {
    const std::string& name = rows.front().vars[j].first;
    if (std::find(opts.deaccumulate_fields.begin(), opts.deaccumulate_fields.end(), name) !=
        opts.deaccumulate_fields.end())
      cols.push_back(j);
  }
  // Walk backwards so each row still sees its predecessor's cumulative value.
  for (std::size_t i = rows.size(); i-- > 1;) {
    if (hour_of_day(rows[i].timestamp) == opts.run_start_hour) continue;  // new forecast run
    for (std::size_t j : cols) rows[i].vars[j].second -= rows[i - 1].vars[j].second;
  }
}

} // namespace

double WeatherRecord::var(const std::string& name) const {
  for (const auto& [n, v] : vars)
    if (n == name) return v;
  fail(Errc::UnknownFeature, "no variable named '" + name + "'");
}

std::vector<WeatherRecord> load_weather(const std::string& path, int zone,
                                        const LoadOptions& opts) {
  std::ifstream in = open_or_fail(path);
  std::string line;
  if (!std::getline(in, line)) return {};
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 2 + kWeatherVarCount)
    fail(Errc::MalformedRow, path + ": expected ZONEID,TIMESTAMP and " +
                                 std::to_string(kWeatherVarCount) + " variable columns, got " +
                                 std::to_string(header.size()));
  if (upper(trim(header[0])) != "ZONEID" || upper(trim(header[1])) != "TIMESTAMP")
    fail(Errc::MalformedRow, path + ": header must start with ZONEID,TIMESTAMP");
  std::vector<std::string> var_names(header.begin() + 2, header.end());
  for (std::string& n : var_names) n = trim(n);

  std::vector<WeatherRecord> rows;
  std::set<int> zones_seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail(Errc::MalformedRow,
           path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
               " fields, got " + std::to_string(fields.size()));
    const int z = parse_zone(fields[0], path, line_no);
    zones_seen.insert(z);
    if (z != zone) continue;
    WeatherRecord rec;
    rec.zone_id = z;
    rec.timestamp = parse_timestamp(trim(fields[1]));
    if (!on_hour(rec.timestamp))
      fail(Errc::MalformedRow, path + ":" + std::to_string(line_no) +
                                   ": timestamp not on an hour boundary: " + trim(fields[1]));
    rec.vars.reserve(kWeatherVarCount);
    for (int j = 0; j < kWeatherVarCount; ++j)
      rec.vars.emplace_back(var_names[std::size_t(j)], parse_double(fields[std::size_t(j) + 2], path, line_no));
    rows.push_back(std::move(rec));
  }
  if (rows.empty() && !zones_seen.empty())
    fail(Errc::UnknownZone, path + ": no rows for zone " + std::to_string(zone));
  check_sorted_series(rows, path);
  if (opts.deaccumulate) deaccumulate(rows, opts);
  return rows;
}

std::vector<PowerRecord> load_power(const std::string& path, int zone) {
  std::ifstream in = open_or_fail(path);
  std::string line;
  if (!std::getline(in, line)) return {};
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 3 || upper(trim(header[0])) != "ZONEID" ||
      upper(trim(header[1])) != "TIMESTAMP" || upper(trim(header[2])) != "POWER")
    fail(Errc::MalformedRow, path + ": header must be ZONEID,TIMESTAMP,POWER");

  std::vector<PowerRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 3)
      fail(Errc::MalformedRow, path + ":" + std::to_string(line_no) + ": expected 3 fields");
    PowerRecord rec;
    rec.zone_id = parse_zone(fields[0], path, line_no);
    if (rec.zone_id != zone) continue;
    rec.timestamp = parse_timestamp(trim(fields[1]));
    rec.power = parse_double(fields[2], path, line_no);
    if (rec.power < 0.0 || rec.power > 1.0)
      fail(Errc::OutOfRangePower, path + ":" + std::to_string(line_no) + ": power " +
                                      std::to_string(rec.power) + " outside [0, 1]");
    rows.push_back(rec);
  }
  check_sorted_series(rows, path);
  return rows;
}

Dataset align(const std::vector<WeatherRecord>& weather, const std::vector<PowerRecord>& power) {
  require(!weather.empty() && !power.empty(), Errc::InvalidArgument,
          "align requires non-empty weather and power series");
  require(weather.front().zone_id == power.front().zone_id, Errc::InvalidArgument,
          "align requires matching zones");
  const std::size_t p = weather.front().vars.size();
  for (const WeatherRecord& r : weather)
    require(r.vars.size() == p, Errc::InvalidArgument, "inconsistent weather record width");

  std::vector<std::pair<std::size_t, std::size_t>> matches;
  std::size_t i = 0, j = 0;
  while (i < weather.size() && j < power.size()) {
    if (weather[i].timestamp < power[j].timestamp) {
      ++i;
    } else if (weather[i].timestamp > power[j].timestamp) {
      ++j;
    } else {
      matches.emplace_back(i, j);
      ++i;
      ++j;
    }
  }
  if (matches.empty()) fail(Errc::EmptyIntersection, "weather and power share no timestamps");

  Dataset ds;
  ds.feature_names.reserve(p);
  for (const auto& [name, value] : weather.front().vars) ds.feature_names.push_back(name);
  ds.X.resize(Eigen::Index(matches.size()), Eigen::Index(p));
  ds.y.resize(Eigen::Index(matches.size()));
  ds.timestamps.reserve(matches.size());
  for (std::size_t r = 0; r < matches.size(); ++r) {
    const WeatherRecord& w = weather[matches[r].first];
    for (std::size_t c = 0; c < p; ++c) ds.X(Eigen::Index(r), Eigen::Index(c)) = w.vars[c].second;
    ds.y[Eigen::Index(r)] = power[matches[r].second].power;
    ds.timestamps.push_back(w.timestamp);
  }
  return ds;
}

CivilDate day_of(std::int64_t ts, DayConvention conv) {
  return epoch_to_date(conv == DayConvention::HourEnding ? ts - kSecondsPerHour : ts);
}

SplitSpec SplitSpec::make(std::int64_t train_begin, std::int64_t train_end,
                          std::int64_t validation_begin, std::int64_t validation_end,
                          std::vector<CivilDate> test_days, DayConvention conv) {
  require(train_begin <= train_end, Errc::InvalidArgument, "train range reversed");
  require(validation_begin <= validation_end, Errc::InvalidArgument, "validation range reversed");
  require(train_end <= validation_begin, Errc::InvalidArgument,
          "train and validation ranges overlap or are out of order");
  SplitSpec spec;
  spec.train_begin = train_begin;
  spec.train_end = train_end;
  spec.validation_begin = validation_begin;
  spec.validation_end = validation_end;
  spec.test_days = std::move(test_days);
  spec.day_convention = conv;
  for (std::size_t k = 1; k < spec.test_days.size(); ++k)
    require(spec.test_days[k - 1] < spec.test_days[k], Errc::InvalidArgument,
            "test days must be strictly increasing");
  if (!spec.test_days.empty()) {
    const auto [first_hour, last_hour] = spec.test_day_hours(spec.test_days.front());
    (void)last_hour;
    require(validation_end <= first_hour, Errc::InvalidArgument,
            "test days must come after the validation range");
  }
  return spec;
}

std::pair<std::int64_t, std::int64_t> SplitSpec::test_day_hours(const CivilDate& day) const {
  const std::int64_t midnight = date_to_epoch(day);
  if (day_convention == DayConvention::HourEnding)
    return {midnight + kSecondsPerHour, midnight + kSecondsPerDay};
  return {midnight, midnight + kSecondsPerDay - kSecondsPerHour};
}

namespace {

// Number of on-hour timestamps in [begin, end).
std::int64_t hours_in_range(std::int64_t begin, std::int64_t end) {
  if (end <= begin) return 0;
  const std::int64_t first = (begin + kSecondsPerHour - 1) / kSecondsPerHour * kSecondsPerHour;
  if (first >= end) return 0;
  return (end - 1 - first) / kSecondsPerHour + 1;
}

} // namespace

SplitResult split(const Dataset& dataset, const SplitSpec& spec) {
  dataset.check_consistent();
  std::vector<Eigen::Index> train_ids, val_ids, test_ids;
  std::size_t day_idx = 0;
  std::vector<std::int64_t> per_day_counts(spec.test_days.size(), 0);
  for (std::size_t r = 0; r < dataset.timestamps.size(); ++r) {
    const std::int64_t ts = dataset.timestamps[r];
    if (ts >= spec.train_begin && ts < spec.train_end) {
      train_ids.push_back(Eigen::Index(r));
      continue;
    }
    if (ts >= spec.validation_begin && ts < spec.validation_end) {
      val_ids.push_back(Eigen::Index(r));
      continue;
    }
    while (day_idx < spec.test_days.size() &&
           ts > spec.test_day_hours(spec.test_days[day_idx]).second)
      ++day_idx;
    if (day_idx < spec.test_days.size()) {
      const auto [first_hour, last_hour] = spec.test_day_hours(spec.test_days[day_idx]);
      if (ts >= first_hour && ts <= last_hour) {
        test_ids.push_back(Eigen::Index(r));
        ++per_day_counts[day_idx];
      }
    }
  }

  const std::int64_t want_train = hours_in_range(spec.train_begin, spec.train_end);
  if (std::int64_t(train_ids.size()) != want_train)
    fail(Errc::RangeNotCovered, "train range expects " + std::to_string(want_train) +
                                    " hourly rows, dataset provides " +
                                    std::to_string(train_ids.size()));
  const std::int64_t want_val = hours_in_range(spec.validation_begin, spec.validation_end);
  if (std::int64_t(val_ids.size()) != want_val)
    fail(Errc::RangeNotCovered, "validation range expects " + std::to_string(want_val) +
                                    " hourly rows, dataset provides " +
                                    std::to_string(val_ids.size()));
  for (std::size_t d = 0; d < spec.test_days.size(); ++d)
    if (per_day_counts[d] != 24)
      fail(Errc::RangeNotCovered, "test day " + format_date(spec.test_days[d]) + " has " +
                                      std::to_string(per_day_counts[d]) + " rows, expected 24");

  SplitResult out;
  out.train = dataset.slice(train_ids);
  out.validation = dataset.slice(val_ids);
  out.test = dataset.slice(test_ids);
  return out;
}

} // namespace pvstack
