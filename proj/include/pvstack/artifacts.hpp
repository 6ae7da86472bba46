#pragma once

#include <string>

#include <json.hpp>

#include "pvstack/ensemble.hpp"
#include "pvstack/knn.hpp"
#include "pvstack/nn.hpp"
#include "pvstack/preprocess.hpp"
#include "pvstack/qrf.hpp"
#include "pvstack/svr.hpp"

namespace pvstack {

inline constexpr int kArtifactSchemaVersion = 1;

// Every artifact carries {"schema_version", "kind"}; loaders reject both
// mismatches.

nlohmann::json to_json(const Normalizer& norm);
Normalizer normalizer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KnnModel& model);
KnnModel knn_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QrfModel& model);
QrfModel qrf_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SvrModel& model);
SvrModel svr_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NnModel& model);
NnModel nn_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EnsembleWeights& weights);
EnsembleWeights ensemble_from_json(const nlohmann::json& j);

/// Parses and checks kind/schema_version (MissingArtifact, SchemaMismatch).
nlohmann::json load_artifact(const std::string& path, const std::string& expected_kind);
void save_artifact(const std::string& path, const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace pvstack
