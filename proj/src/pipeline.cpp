#include "pvstack/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "pvstack/artifacts.hpp"
#include "pvstack/csv.hpp"
#include "pvstack/error.hpp"
#include "pvstack/rng.hpp"

namespace pvstack {

namespace {

// Per-model RNG streams derived from the run seed.
constexpr std::uint64_t kQrfStream = 1;
constexpr std::uint64_t kNnStream = 2;

Dataset select_physical(const Dataset& full, const RunConfig& config,
                        const std::vector<std::string>& physical_names) {
  Dataset out = select_columns(full, FeatureSpec::make(config.resolve_columns(physical_names)));
  out.feature_names = physical_names;  // present physical names downstream
  return out;
}

} // namespace

PipelineData prepare_data(const RunConfig& config) {
  config.validate();
  const std::vector<WeatherRecord> weather =
      load_weather(config.weather_csv, config.zone, config.load_options());
  const std::vector<PowerRecord> power = load_power(config.power_csv, config.zone);
  const Dataset full = align(weather, power);
  const SplitResult parts = split(full, config.split_spec());

  PipelineData data;
  data.member_train = select_physical(parts.train, config, config.member_features);
  data.member_val = select_physical(parts.validation, config, config.member_features);
  data.member_test = select_physical(parts.test, config, config.member_features);
  data.nn_train = select_physical(parts.train, config, config.nn_features);
  data.nn_val = select_physical(parts.validation, config, config.nn_features);
  data.nn_test = select_physical(parts.test, config, config.nn_features);
  return data;
}

namespace {

Eigen::VectorXd member_predictions(const std::string& name, const ModelSet& models,
                                   const Dataset& member_ds, const Dataset& nn_ds) {
  if (name == "knn") return models.knn.predict_batch(member_ds.X);
  if (name == "qrf") return models.qrf.predict_batch(member_ds.X, models.qrf.config().quantile);
  if (name == "svr") return models.svr.predict_batch(member_ds.X);
  if (name == "nn") return models.nn.predict_batch(nn_ds.X.col(0));
  fail(Errc::MemberMismatch, "unknown model '" + name + "'");
}

} // namespace

ModelSet train_models(const RunConfig& config, const PipelineData& data) {
  ModelSet models;
  models.member_norm = fit_normalizer(data.member_train);
  models.nn_norm = fit_normalizer(data.nn_train);

  const Dataset member_train = transform(models.member_norm, data.member_train);
  const Dataset nn_train = transform(models.nn_norm, data.nn_train);

  models.knn = KnnModel::fit(member_train, config.knn_k, config.knn_bandwidth);

  QrfConfig qrf_cfg = config.qrf;
  qrf_cfg.rng_seed = mix_seed(config.seed, kQrfStream);
  models.qrf = QrfModel::fit(member_train, qrf_cfg);

  models.svr = SvrModel::fit(member_train, config.svr);

  NnTrainConfig nn_cfg = config.nn;
  nn_cfg.rng_seed = mix_seed(config.seed, kNnStream);
  models.nn = NnModel::fit(nn_train, nn_cfg);

  const Dataset member_val = transform(models.member_norm, data.member_val);
  const Dataset nn_val = transform(models.nn_norm, data.nn_val);
  Eigen::MatrixXd preds(member_val.rows(), Eigen::Index(config.ensemble_members.size()));
  for (std::size_t m = 0; m < config.ensemble_members.size(); ++m)
    preds.col(Eigen::Index(m)) =
        member_predictions(config.ensemble_members[m], models, member_val, nn_val);
  models.ens = fit_weights(preds, member_val.y, config.ensemble_members,
                           config.ensemble_intercept, config.ensemble_clip);
  return models;
}

std::vector<std::string> artifact_paths(const RunConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  return {(dir / "norm_members.json").string(), (dir / "norm_nn.json").string(),
          (dir / "knn.json").string(),          (dir / "qrf.json").string(),
          (dir / "svr.json").string(),          (dir / "nn.json").string(),
          (dir / "ensemble.json").string()};
}

void save_models(const RunConfig& config, const ModelSet& models) {
  std::filesystem::create_directories(config.output_dir);
  const std::vector<std::string> paths = artifact_paths(config);
  save_artifact(paths[0], to_json(models.member_norm));
  save_artifact(paths[1], to_json(models.nn_norm));
  save_artifact(paths[2], to_json(models.knn));
  save_artifact(paths[3], to_json(models.qrf));
  save_artifact(paths[4], to_json(models.svr));
  save_artifact(paths[5], to_json(models.nn));
  save_artifact(paths[6], to_json(models.ens));
}

ModelSet load_models(const RunConfig& config) {
  const std::vector<std::string> paths = artifact_paths(config);
  ModelSet models;
  models.member_norm = normalizer_from_json(load_artifact(paths[0], "normalizer"));
  models.nn_norm = normalizer_from_json(load_artifact(paths[1], "normalizer"));
  models.knn = knn_from_json(load_artifact(paths[2], "knn"));
  models.qrf = qrf_from_json(load_artifact(paths[3], "qrf"));
  models.svr = svr_from_json(load_artifact(paths[4], "svr"));
  models.nn = nn_from_json(load_artifact(paths[5], "nn"));
  models.ens = ensemble_from_json(load_artifact(paths[6], "ensemble"));
  return models;
}

PredictionTable predict_test(const RunConfig& config, const ModelSet& models,
                             const PipelineData& data) {
  require(data.member_test.rows() > 0, Errc::RangeNotCovered, "test split is empty");
  const Dataset member_test = transform(models.member_norm, data.member_test);
  const Dataset nn_test = transform(models.nn_norm, data.nn_test);

  PredictionTable table;
  table.timestamps = member_test.timestamps;
  table.actual = member_test.y;
  table.model_names = {"nn", "knn", "qrf", "svr", "ens"};
  table.preds.resize(member_test.rows(), 5);
  table.preds.col(0) = models.nn.predict_batch(nn_test.X.col(0));
  table.preds.col(1) = models.knn.predict_batch(member_test.X);
  table.preds.col(2) = models.qrf.predict_batch(member_test.X, models.qrf.config().quantile);
  table.preds.col(3) = models.svr.predict_batch(member_test.X);

  Eigen::MatrixXd member_cols(member_test.rows(),
                              Eigen::Index(models.ens.member_names.size()));
  for (std::size_t m = 0; m < models.ens.member_names.size(); ++m)
    member_cols.col(Eigen::Index(m)) = table.column(models.ens.member_names[m]);
  table.preds.col(4) = ensemble_predict_batch(models.ens, member_cols);
  return table;
}

Eigen::VectorXd PredictionTable::column(const std::string& model) const {
  const auto it = std::find(model_names.begin(), model_names.end(), model);
  require(it != model_names.end(), Errc::MemberMismatch, "no prediction column '" + model + "'");
  return preds.col(it - model_names.begin());
}

std::string PredictionTable::to_csv() const {
  std::string out = "timestamp,actual";
  for (const std::string& m : model_names) out += "," + m;
  out += "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < preds.rows(); ++i) {
    out += format_timestamp(timestamps[std::size_t(i)]);
    std::snprintf(buf, sizeof buf, ",%.6f", actual[i]);
    out += buf;
    for (Eigen::Index m = 0; m < preds.cols(); ++m) {
      std::snprintf(buf, sizeof buf, ",%.6f", preds(i, m));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

PredictionTable PredictionTable::from_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  require(bool(std::getline(ss, line)), Errc::MalformedRow, "empty predictions file");
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) header.push_back(field);
  }
  require(header.size() >= 3 && header[0] == "timestamp" && header[1] == "actual",
          Errc::MalformedRow, "predictions header must start with timestamp,actual");

  PredictionTable table;
  table.model_names.assign(header.begin() + 2, header.end());
  std::vector<std::int64_t> ts;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    ts.push_back(parse_timestamp(field));
    while (std::getline(ls, field, ',')) values.push_back(std::stod(field));
    ++rows;
  }
  const std::size_t cols = header.size() - 1;  // actual + models
  require(values.size() == rows * cols, Errc::MalformedRow, "ragged predictions file");
  table.timestamps = std::move(ts);
  table.actual.resize(Eigen::Index(rows));
  table.preds.resize(Eigen::Index(rows), Eigen::Index(cols - 1));
  for (std::size_t i = 0; i < rows; ++i) {
    table.actual[Eigen::Index(i)] = values[i * cols];
    for (std::size_t m = 0; m + 1 < cols; ++m)
      table.preds(Eigen::Index(i), Eigen::Index(m)) = values[i * cols + m + 1];
  }
  return table;
}

ErrorReport make_report(const RunConfig& config, const PredictionTable& table) {
  Eigen::MatrixXd preds(table.preds.rows(), Eigen::Index(config.report_models.size()));
  for (std::size_t m = 0; m < config.report_models.size(); ++m)
    preds.col(Eigen::Index(m)) = table.column(config.report_models[m]);
  std::vector<CivilDate> days;
  for (const std::string& d : config.test_days) days.push_back(parse_date(d));
  return daily_weekly_report(config.report_models, preds, table.actual, table.timestamps, days,
                             config.capacity, config.day_convention);
}

} // namespace pvstack
