#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pvstack/csv.hpp"
#include "pvstack/knn.hpp"
#include "pvstack/nn.hpp"
#include "pvstack/qrf.hpp"
#include "pvstack/svr.hpp"

namespace pvstack {

/// Everything a pipeline run needs, loadable from a flat `key = value` config
/// file with dotted keys (see configs/ for an annotated example).
struct RunConfig {
  // data
  std::string weather_csv;
  std::string power_csv;
  int zone = 1;
  bool deaccumulate = false;
  std::vector<std::string> deaccumulate_fields = {"VAR169", "VAR175", "VAR178", "VAR228"};
  int run_start_hour = 1;
  DayConvention day_convention = DayConvention::HourEnding;
  /// Physical variable name -> CSV column; names without an entry are used
  /// verbatim.
  std::map<std::string, std::string> column_map = {{"TCC", "VAR164"},
                                                   {"SSRD", "VAR169"},
                                                   {"STRD", "VAR175"},
                                                   {"TSR", "VAR178"},
                                                   {"TP", "VAR228"}};
  // split (paper protocol: 2013 for train+validation, last 20% of the year
  // as the validation block, Feb 20-26 2014 for test)
  std::string train_begin = "2013-01-01T01:00";
  std::string train_end = "2013-10-20T01:00";
  std::string validation_begin = "2013-10-20T01:00";
  std::string validation_end = "2014-01-01T01:00";
  std::vector<std::string> test_days = {"2014-02-20", "2014-02-21", "2014-02-22", "2014-02-23",
                                        "2014-02-24", "2014-02-25", "2014-02-26"};
  // features
  std::vector<std::string> member_features = {"TCC", "SSRD", "STRD", "TSR", "TP"};
  std::vector<std::string> nn_features = {"SSRD"};
  // models
  int knn_k = 300;
  BandwidthRule knn_bandwidth;
  QrfConfig qrf;
  SvrConfig svr;
  NnTrainConfig nn;
  std::vector<std::string> ensemble_members = {"knn", "qrf", "svr"};
  bool ensemble_intercept = false;
  bool ensemble_clip = true;
  std::vector<std::string> report_models = {"qrf", "knn", "svr", "ens"};
  double capacity = 1.0;
  // run
  std::uint64_t seed = 42;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);
  /// `--set key=value` override; same keys as the file format.
  void apply_override(const std::string& assignment);
  std::string serialize() const;
  void validate() const;

  SplitSpec split_spec() const;
  LoadOptions load_options() const;
  /// Physical names resolved through column_map.
  std::vector<std::string> resolve_columns(const std::vector<std::string>& names) const;
};

} // namespace pvstack
