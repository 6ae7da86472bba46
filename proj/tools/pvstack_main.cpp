#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pvstack/artifacts.hpp"
#include "pvstack/config.hpp"
#include "pvstack/error.hpp"
#include "pvstack/oracle_suite.hpp"
#include "pvstack/pipeline.hpp"

namespace {

using pvstack::RunConfig;

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig config = RunConfig::from_file(path);
  for (const std::string& assignment : overrides) config.apply_override(assignment);
  config.validate();
  return config;
}

std::filesystem::path out_path(const RunConfig& config, const char* name) {
  return std::filesystem::path(config.output_dir) / name;
}

int cmd_train(const RunConfig& config) {
  const pvstack::PipelineData data = pvstack::prepare_data(config);
  std::printf("loaded %lld training rows, %lld validation rows, %lld test rows\n",
              (long long)data.member_train.rows(), (long long)data.member_val.rows(),
              (long long)data.member_test.rows());
  const pvstack::ModelSet models = pvstack::train_models(config, data);
  pvstack::save_models(config, models);
  for (const std::string& path : pvstack::artifact_paths(config))
    std::printf("wrote %s\n", path.c_str());
  std::printf("ensemble weights (");
  for (std::size_t m = 0; m < models.ens.member_names.size(); ++m)
    std::printf("%s%s", m ? ", " : "", models.ens.member_names[m].c_str());
  std::printf("):");
  for (Eigen::Index i = 0; i < models.ens.w.size(); ++i) std::printf(" %.6f", models.ens.w[i]);
  std::printf("  [rank %d, residual^2 %.6g]\n", models.ens.rank, models.ens.residual_sq);
  std::printf("svr: %ld iterations, kkt violation %.2g\n", models.svr.diagnostics().iterations,
              models.svr.diagnostics().kkt_violation);
  return 0;
}

int cmd_predict(const RunConfig& config) {
  const pvstack::ModelSet models = pvstack::load_models(config);
  const pvstack::PipelineData data = pvstack::prepare_data(config);
  const pvstack::PredictionTable table = pvstack::predict_test(config, models, data);
  std::filesystem::create_directories(config.output_dir);
  const std::string path = out_path(config, "predictions.csv").string();
  pvstack::write_text_file(path, table.to_csv());
  std::printf("wrote %s (%lld rows)\n", path.c_str(), (long long)table.preds.rows());
  return 0;
}

int write_report_files(const RunConfig& config, const pvstack::PredictionTable& table) {
  const pvstack::ErrorReport report = pvstack::make_report(config, table);
  const std::string csv_path = out_path(config, "nmae.csv").string();
  const std::string txt_path = out_path(config, "nmae.txt").string();
  pvstack::write_text_file(csv_path, report.to_csv());
  pvstack::write_text_file(txt_path, report.to_text());
  std::printf("%s", report.to_text().c_str());
  std::printf("wrote %s and %s\n", csv_path.c_str(), txt_path.c_str());
  return 0;
}

int cmd_evaluate(const RunConfig& config) {
  const pvstack::ModelSet models = pvstack::load_models(config);
  const pvstack::PipelineData data = pvstack::prepare_data(config);
  const pvstack::PredictionTable table = pvstack::predict_test(config, models, data);
  std::filesystem::create_directories(config.output_dir);
  const std::string path = out_path(config, "predictions.csv").string();
  pvstack::write_text_file(path, table.to_csv());
  std::printf("wrote %s\n", path.c_str());
  return write_report_files(config, table);
}

int cmd_report(const RunConfig& config, std::string predictions_path) {
  if (predictions_path.empty()) predictions_path = out_path(config, "predictions.csv").string();
  const pvstack::PredictionTable table =
      pvstack::PredictionTable::from_csv(pvstack::read_text_file(predictions_path));
  std::filesystem::create_directories(config.output_dir);
  return write_report_files(config, table);
}

int cmd_oracle(const pvstack::SuiteOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const std::vector<pvstack::SuiteResult> results = pvstack::run_all_oracle_suites(opts);
  const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
  int failures = 0;
  for (const pvstack::SuiteResult& r : results) {
    std::printf("%-40s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("oracle suites finished in %.1f s, %d/%zu failed\n", elapsed, failures,
              results.size());
  return failures == 0 ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"photovoltaic power forecasting: base regressors, stacked ensemble, nMAE harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string predictions_path;
  pvstack::SuiteOptions oracle_opts;

  const auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "config file (key = value)")->required();
    cmd->add_option("--set", overrides, "override a config key, e.g. --set run.seed=7");
  };

  CLI::App* train = app.add_subcommand("train", "fit all models and write artifacts");
  add_config(train);
  CLI::App* predict = app.add_subcommand("predict", "predict the test window from artifacts");
  add_config(predict);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "predict and write nMAE reports (predictions.csv, nmae.*)");
  add_config(evaluate);
  CLI::App* report = app.add_subcommand("report", "recompute nMAE reports from a predictions.csv");
  add_config(report);
  report->add_option("--predictions", predictions_path, "predictions csv path");

  CLI::App* oracle = app.add_subcommand("oracle", "run brute-force oracle checks");
  oracle->add_option("--seed", oracle_opts.seed, "suite seed");
  oracle->add_option("--svr-instances", oracle_opts.svr_instances, "random nu-SVR instances");
  oracle->add_option("--qrf-instances", oracle_opts.qrf_instances, "random tree instances");
  oracle->add_option("--ensemble-instances", oracle_opts.ensemble_instances,
                     "random stacking instances");
  oracle->add_option("--quantile-instances", oracle_opts.quantile_instances,
                     "random weighted-quantile instances");
  oracle->add_flag("--corrupt-tolerance", oracle_opts.corrupt_tolerance,
                   "debug: zero the tolerances to demonstrate failure reporting");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle->parsed()) return cmd_oracle(oracle_opts);
    const RunConfig config = load_config(config_path, overrides);
    if (train->parsed()) return cmd_train(config);
    if (predict->parsed()) return cmd_predict(config);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (report->parsed()) return cmd_report(config, predictions_path);
  } catch (const pvstack::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return pvstack::errc_exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
