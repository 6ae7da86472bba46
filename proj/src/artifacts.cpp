#include "pvstack/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "pvstack/error.hpp"

namespace pvstack {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(Eigen::Index(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[Eigen::Index(i)] = a[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& rows, Eigen::Index cols_hint = 0) {
  const Eigen::Index r = Eigen::Index(rows.size());
  const Eigen::Index c = r > 0 ? Eigen::Index(rows[0].size()) : cols_hint;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)].get<double>();
  return m;
}

json header(const char* kind) {
  return json{{"schema_version", kArtifactSchemaVersion}, {"kind", kind}};
}

} // namespace

nlohmann::json to_json(const Normalizer& norm) {
  json j = header("normalizer");
  json features = json::array();
  for (std::size_t i = 0; i < norm.feature_names.size(); ++i) {
    features.push_back(json{{"name", norm.feature_names[i]},
                            {"min", norm.min[Eigen::Index(i)]},
                            {"max", norm.max[Eigen::Index(i)]},
                            {"degenerate", bool(norm.degenerate[i])}});
  }
  j["features"] = std::move(features);
  return j;
}

Normalizer normalizer_from_json(const nlohmann::json& j) {
  Normalizer norm;
  const auto& features = j.at("features");
  norm.min.resize(Eigen::Index(features.size()));
  norm.max.resize(Eigen::Index(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    norm.feature_names.push_back(features[i].at("name").get<std::string>());
    norm.min[Eigen::Index(i)] = features[i].at("min").get<double>();
    norm.max[Eigen::Index(i)] = features[i].at("max").get<double>();
    norm.degenerate.push_back(features[i].at("degenerate").get<bool>());
  }
  return norm;
}

nlohmann::json to_json(const KnnModel& model) {
  json j = header("knn");
  j["k"] = model.k();
  j["bandwidth"] = json{{"kind", model.rule().kind == BandwidthRule::Kind::AdaptiveMedian
                                     ? "median"
                                     : "fixed"},
                        {"sigma", model.rule().fixed_sigma}};
  j["x_train"] = mat_to_json(model.x_train());
  j["y_train"] = vec_to_json(model.y_train());
  return j;
}

KnnModel knn_from_json(const nlohmann::json& j) {
  BandwidthRule rule;
  rule.kind = j.at("bandwidth").at("kind").get<std::string>() == "median"
                  ? BandwidthRule::Kind::AdaptiveMedian
                  : BandwidthRule::Kind::Fixed;
  rule.fixed_sigma = j.at("bandwidth").at("sigma").get<double>();
  return KnnModel(mat_from_json(j.at("x_train")), vec_from_json(j.at("y_train")),
                  j.at("k").get<int>(), rule);
}

nlohmann::json to_json(const QrfModel& model) {
  json j = header("qrf");
  const QrfConfig& cfg = model.config();
  j["config"] = json{{"n_trees", cfg.n_trees},
                     {"min_samples_leaf", cfg.min_samples_leaf},
                     {"quantile", cfg.quantile},
                     {"mtry", cfg.mtry},
                     {"bootstrap", cfg.bootstrap},
                     {"rng_seed", cfg.rng_seed}};
  j["y_train"] = vec_to_json(model.y_train());
  json trees = json::array();
  for (const Tree& tree : model.trees()) {
    json nodes = json::array();
    for (const Tree::Node& nd : tree.nodes)
      nodes.push_back(json::array(
          {nd.feature, nd.threshold, nd.left, nd.right, nd.leaf_begin, nd.leaf_count}));
    trees.push_back(json{{"nodes", std::move(nodes)}, {"leaf_rows", tree.leaf_rows}});
  }
  j["trees"] = std::move(trees);
  return j;
}

QrfModel qrf_from_json(const nlohmann::json& j) {
  QrfConfig cfg;
  const json& jc = j.at("config");
  cfg.n_trees = jc.at("n_trees").get<int>();
  cfg.min_samples_leaf = jc.at("min_samples_leaf").get<int>();
  cfg.quantile = jc.at("quantile").get<double>();
  cfg.mtry = jc.at("mtry").get<int>();
  cfg.bootstrap = jc.at("bootstrap").get<bool>();
  cfg.rng_seed = jc.at("rng_seed").get<std::uint64_t>();
  std::vector<Tree> trees;
  for (const json& jt : j.at("trees")) {
    Tree tree;
    for (const json& jn : jt.at("nodes")) {
      Tree::Node nd;
      nd.feature = jn[0].get<int>();
      nd.threshold = jn[1].get<double>();
      nd.left = jn[2].get<int>();
      nd.right = jn[3].get<int>();
      nd.leaf_begin = jn[4].get<int>();
      nd.leaf_count = jn[5].get<int>();
      tree.nodes.push_back(nd);
    }
    tree.leaf_rows = jt.at("leaf_rows").get<std::vector<int>>();
    trees.push_back(std::move(tree));
  }
  return QrfModel(std::move(trees), vec_from_json(j.at("y_train")), cfg);
}

nlohmann::json to_json(const SvrModel& model) {
  json j = header("svr");
  const SvrConfig& cfg = model.config();
  j["config"] = json{{"nu", cfg.nu},       {"gamma", cfg.gamma},
                     {"c", cfg.c},         {"tol", cfg.tol},
                     {"max_iter", cfg.max_iter}};
  j["convention"] = SvrModel::kConvention;
  j["bias"] = model.bias();
  j["epsilon"] = model.epsilon();
  j["coeffs"] = vec_to_json(model.dual_coeffs());
  j["support_vectors"] = mat_to_json(model.support_vectors());
  const SvrDiagnostics& d = model.diagnostics();
  j["diagnostics"] = json{{"iterations", d.iterations},
                          {"kkt_violation", d.kkt_violation},
                          {"converged", d.converged},
                          {"n_train", d.n_train}};
  return j;
}

SvrModel svr_from_json(const nlohmann::json& j) {
  SvrConfig cfg;
  const json& jc = j.at("config");
  cfg.nu = jc.at("nu").get<double>();
  cfg.gamma = jc.at("gamma").get<double>();
  cfg.c = jc.at("c").get<double>();
  cfg.tol = jc.at("tol").get<double>();
  cfg.max_iter = jc.at("max_iter").get<long>();
  if (j.at("convention").get<std::string>() != SvrModel::kConvention)
    fail(Errc::SchemaMismatch, "unsupported nu-SVR convention tag");
  SvrDiagnostics diag;
  const json& jd = j.at("diagnostics");
  diag.iterations = jd.at("iterations").get<long>();
  diag.kkt_violation = jd.at("kkt_violation").get<double>();
  diag.converged = jd.at("converged").get<bool>();
  diag.n_train = jd.at("n_train").get<int>();
  Eigen::MatrixXd sv = mat_from_json(j.at("support_vectors"));
  return SvrModel(std::move(sv), vec_from_json(j.at("coeffs")), j.at("bias").get<double>(),
                  j.at("epsilon").get<double>(), cfg, std::move(diag), Eigen::VectorXd());
}

nlohmann::json to_json(const NnModel& model) {
  json j = header("nn");
  const NnParams& p = model.params();
  j["w1"] = vec_to_json(p.w1);
  j["b1"] = vec_to_json(p.b1);
  j["w2"] = vec_to_json(p.w2);
  j["b2"] = p.b2;
  j["alpha"] = model.alpha();
  j["beta"] = model.beta();
  j["gamma_eff"] = model.gamma_eff();
  j["rng_seed"] = model.rng_seed();
  const NnTrainConfig& cfg = model.config();
  j["config"] = json{{"hidden", cfg.hidden},     {"max_epochs", cfg.max_epochs},
                     {"mu_init", cfg.mu_init},   {"mu_inc", cfg.mu_inc},
                     {"mu_dec", cfg.mu_dec},     {"grad_tol", cfg.grad_tol}};
  return j;
}

NnModel nn_from_json(const nlohmann::json& j) {
  NnParams p;
  p.w1 = vec_from_json(j.at("w1"));
  p.b1 = vec_from_json(j.at("b1"));
  p.w2 = vec_from_json(j.at("w2"));
  p.b2 = j.at("b2").get<double>();
  NnTrainConfig cfg;
  const json& jc = j.at("config");
  cfg.hidden = jc.at("hidden").get<int>();
  cfg.max_epochs = jc.at("max_epochs").get<int>();
  cfg.mu_init = jc.at("mu_init").get<double>();
  cfg.mu_inc = jc.at("mu_inc").get<double>();
  cfg.mu_dec = jc.at("mu_dec").get<double>();
  cfg.grad_tol = jc.at("grad_tol").get<double>();
  return NnModel(std::move(p), j.at("alpha").get<double>(), j.at("beta").get<double>(),
                 j.at("gamma_eff").get<double>(), j.at("rng_seed").get<std::uint64_t>(), cfg);
}

nlohmann::json to_json(const EnsembleWeights& weights) {
  json j = header("ensemble");
  j["members"] = weights.member_names;
  j["weights"] = vec_to_json(weights.w);
  j["intercept"] = weights.intercept;
  j["clip"] = weights.clip;
  j["diagnostics"] = json{{"rank", weights.rank}, {"residual_sq", weights.residual_sq}};
  return j;
}

EnsembleWeights ensemble_from_json(const nlohmann::json& j) {
  EnsembleWeights w;
  w.member_names = j.at("members").get<std::vector<std::string>>();
  w.w = vec_from_json(j.at("weights"));
  w.intercept = j.at("intercept").get<bool>();
  w.clip = j.at("clip").get<bool>();
  w.rank = j.at("diagnostics").at("rank").get<int>();
  w.residual_sq = j.at("diagnostics").at("residual_sq").get<double>();
  return w;
}

nlohmann::json load_artifact(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) fail(Errc::MissingArtifact, "cannot open artifact " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(Errc::SchemaMismatch, path + ": " + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != kArtifactSchemaVersion)
    fail(Errc::SchemaMismatch, path + ": unsupported schema version");
  if (!j.contains("kind") || j["kind"].get<std::string>() != expected_kind)
    fail(Errc::SchemaMismatch, path + ": expected kind '" + expected_kind + "'");
  return j;
}

void save_artifact(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(1) + "\n");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingArtifact, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::InvalidArgument, "cannot write " + path);
  out << content;
}

} // namespace pvstack
