#include "pvstack/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "pvstack/error.hpp"

namespace pvstack {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(Errc::ConfigError, key + ": expected true/false, got '" + s + "'");
}

double parse_num(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    fail(Errc::ConfigError, key + ": expected a number, got '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& key) {
  const double v = parse_num(s, key);
  const auto i = std::int64_t(v);
  if (double(i) != v) fail(Errc::ConfigError, key + ": expected an integer, got '" + s + "'");
  return i;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

namespace {

// Single source of truth for the key set: applies one assignment to a config.
void assign(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = unquote(trim(raw));
  const auto is = [&](const char* k) { return key == k; };

  if (is("data.weather_csv")) c.weather_csv = value;
  else if (is("data.power_csv")) c.power_csv = value;
  else if (is("data.zone")) c.zone = int(parse_int(value, key));
  else if (is("data.deaccumulate")) c.deaccumulate = parse_bool(value, key);
  else if (is("data.deaccumulate_fields")) c.deaccumulate_fields = split_list(value);
  else if (is("data.run_start_hour")) c.run_start_hour = int(parse_int(value, key));
  else if (is("data.day_convention")) {
    if (value == "hour_ending") c.day_convention = DayConvention::HourEnding;
    else if (value == "hour_beginning") c.day_convention = DayConvention::HourBeginning;
    else fail(Errc::ConfigError, key + ": expected hour_ending or hour_beginning");
  } else if (key.rfind("columns.", 0) == 0) {
    c.column_map[key.substr(8)] = value;
  } else if (is("split.train_begin")) c.train_begin = value;
  else if (is("split.train_end")) c.train_end = value;
  else if (is("split.validation_begin")) c.validation_begin = value;
  else if (is("split.validation_end")) c.validation_end = value;
  else if (is("split.test_days")) c.test_days = split_list(value);
  else if (is("features.members")) c.member_features = split_list(value);
  else if (is("features.nn")) c.nn_features = split_list(value);
  else if (is("knn.k")) c.knn_k = int(parse_int(value, key));
  else if (is("knn.bandwidth")) {
    if (value == "median") c.knn_bandwidth.kind = BandwidthRule::Kind::AdaptiveMedian;
    else if (value == "fixed") c.knn_bandwidth.kind = BandwidthRule::Kind::Fixed;
    else fail(Errc::ConfigError, key + ": expected median or fixed");
  } else if (is("knn.sigma")) c.knn_bandwidth.fixed_sigma = parse_num(value, key);
  else if (is("qrf.trees")) c.qrf.n_trees = int(parse_int(value, key));
  else if (is("qrf.min_samples_leaf")) c.qrf.min_samples_leaf = int(parse_int(value, key));
  else if (is("qrf.quantile")) c.qrf.quantile = parse_num(value, key);
  else if (is("qrf.mtry")) c.qrf.mtry = int(parse_int(value, key));
  else if (is("qrf.bootstrap")) c.qrf.bootstrap = parse_bool(value, key);
  else if (is("svr.nu")) c.svr.nu = parse_num(value, key);
  else if (is("svr.gamma")) c.svr.gamma = parse_num(value, key);
  else if (is("svr.c")) c.svr.c = parse_num(value, key);
  else if (is("svr.tol")) c.svr.tol = parse_num(value, key);
  else if (is("svr.max_iter")) c.svr.max_iter = long(parse_int(value, key));
  else if (is("svr.cache_mb"))
    c.svr.cache_bytes = std::size_t(parse_int(value, key)) << 20;
  else if (is("nn.hidden")) c.nn.hidden = int(parse_int(value, key));
  else if (is("nn.max_epochs")) c.nn.max_epochs = int(parse_int(value, key));
  else if (is("nn.mu_init")) c.nn.mu_init = parse_num(value, key);
  else if (is("nn.mu_inc")) c.nn.mu_inc = parse_num(value, key);
  else if (is("nn.mu_dec")) c.nn.mu_dec = parse_num(value, key);
  else if (is("nn.grad_tol")) c.nn.grad_tol = parse_num(value, key);
  else if (is("ensemble.members")) c.ensemble_members = split_list(value);
  else if (is("ensemble.intercept")) c.ensemble_intercept = parse_bool(value, key);
  else if (is("ensemble.clip")) c.ensemble_clip = parse_bool(value, key);
  else if (is("report.models")) c.report_models = split_list(value);
  else if (is("metrics.capacity")) c.capacity = parse_num(value, key);
  else if (is("run.seed")) c.seed = std::uint64_t(parse_int(value, key));
  else if (is("run.output_dir")) c.output_dir = value;
  else fail(Errc::ConfigError, "unknown config key '" + key + "'");
}

} // namespace

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    assign(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ConfigError, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

void RunConfig::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    fail(Errc::ConfigError, "--set expects key=value, got '" + assignment + "'");
  assign(*this, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string RunConfig::serialize() const {
  std::string out;
  const auto add = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  add("data.weather_csv", weather_csv);
  add("data.power_csv", power_csv);
  add("data.zone", std::to_string(zone));
  add("data.deaccumulate", deaccumulate ? "true" : "false");
  add("data.deaccumulate_fields", join_list(deaccumulate_fields));
  add("data.run_start_hour", std::to_string(run_start_hour));
  add("data.day_convention",
      day_convention == DayConvention::HourEnding ? "hour_ending" : "hour_beginning");
  for (const auto& [name, col] : column_map) add("columns." + name, col);
  add("split.train_begin", train_begin);
  add("split.train_end", train_end);
  add("split.validation_begin", validation_begin);
  add("split.validation_end", validation_end);
  add("split.test_days", join_list(test_days));
  add("features.members", join_list(member_features));
  add("features.nn", join_list(nn_features));
  add("knn.k", std::to_string(knn_k));
  add("knn.bandwidth",
      knn_bandwidth.kind == BandwidthRule::Kind::AdaptiveMedian ? "median" : "fixed");
  add("knn.sigma", fmt_num(knn_bandwidth.fixed_sigma));
  add("qrf.trees", std::to_string(qrf.n_trees));
  add("qrf.min_samples_leaf", std::to_string(qrf.min_samples_leaf));
  add("qrf.quantile", fmt_num(qrf.quantile));
  add("qrf.mtry", std::to_string(qrf.mtry));
  add("qrf.bootstrap", qrf.bootstrap ? "true" : "false");
  add("svr.nu", fmt_num(svr.nu));
  add("svr.gamma", fmt_num(svr.gamma));
  add("svr.c", fmt_num(svr.c));
  add("svr.tol", fmt_num(svr.tol));
  add("svr.max_iter", std::to_string(svr.max_iter));
  add("svr.cache_mb", std::to_string(svr.cache_bytes >> 20));
  add("nn.hidden", std::to_string(nn.hidden));
  add("nn.max_epochs", std::to_string(nn.max_epochs));
  add("nn.mu_init", fmt_num(nn.mu_init));
  add("nn.mu_inc", fmt_num(nn.mu_inc));
  add("nn.mu_dec", fmt_num(nn.mu_dec));
  add("nn.grad_tol", fmt_num(nn.grad_tol));
  add("ensemble.members", join_list(ensemble_members));
  add("ensemble.intercept", ensemble_intercept ? "true" : "false");
  add("ensemble.clip", ensemble_clip ? "true" : "false");
  add("report.models", join_list(report_models));
  add("metrics.capacity", fmt_num(capacity));
  add("run.seed", std::to_string(seed));
  add("run.output_dir", output_dir);
  return out;
}

void RunConfig::validate() const {
  require(zone >= 0, Errc::ConfigError, "data.zone must be non-negative");
  require(run_start_hour >= 0 && run_start_hour <= 23, Errc::ConfigError,
          "data.run_start_hour must lie in [0, 23]");
  require(knn_k >= 1, Errc::ConfigError, "knn.k must be positive");
  if (knn_bandwidth.kind == BandwidthRule::Kind::Fixed)
    require(knn_bandwidth.fixed_sigma > 0, Errc::ConfigError, "knn.sigma must be positive");
  qrf.validate();
  svr.validate();
  nn.validate();
  require(capacity > 0, Errc::ConfigError, "metrics.capacity must be positive");
  require(!member_features.empty(), Errc::ConfigError, "features.members must not be empty");
  require(!nn_features.empty(), Errc::ConfigError, "features.nn must not be empty");
  require(nn_features.size() == 1, Errc::ConfigError, "features.nn must name exactly one variable");

  const std::set<std::string> known_members = {"nn", "knn", "qrf", "svr"};
  require(!ensemble_members.empty(), Errc::ConfigError, "ensemble.members must not be empty");
  for (const std::string& m : ensemble_members)
    require(known_members.count(m) > 0, Errc::ConfigError, "unknown ensemble member '" + m + "'");
  for (const std::string& m : report_models)
    require(known_members.count(m) > 0 || m == "ens", Errc::ConfigError,
            "unknown report model '" + m + "'");
  split_spec();  // validates dates and ordering
}

SplitSpec RunConfig::split_spec() const {
  std::vector<CivilDate> days;
  days.reserve(test_days.size());
  for (const std::string& d : test_days) days.push_back(parse_date(d));
  try {
    return SplitSpec::make(parse_timestamp(train_begin), parse_timestamp(train_end),
                           parse_timestamp(validation_begin), parse_timestamp(validation_end),
                           std::move(days), day_convention);
  } catch (const Error& e) {
    fail(Errc::ConfigError, std::string("invalid split: ") + e.what());
  }
}

LoadOptions RunConfig::load_options() const {
  LoadOptions opts;
  opts.deaccumulate = deaccumulate;
  opts.deaccumulate_fields = deaccumulate_fields;
  opts.run_start_hour = run_start_hour;
  return opts;
}

std::vector<std::string> RunConfig::resolve_columns(const std::vector<std::string>& names) const {
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const std::string& n : names) {
    const auto it = column_map.find(n);
    out.push_back(it == column_map.end() ? n : it->second);
  }
  return out;
}

} // namespace pvstack
