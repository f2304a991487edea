#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "soris/cnn.hpp"
#include "soris/rnn.hpp"
#include "soris/selection.hpp"
#include "soris/training.hpp"

namespace soris {

inline constexpr int kModelSchemaVersion = 1;

// Everything needed to apply a trained network to fresh estimates.
struct StoredModel {
  std::variant<RnnModel, CnnModel> net;
  ActiveSet set;
  TrainConfig training;
  std::vector<double> loss_trace;

  std::string kind() const { return std::holds_alternative<RnnModel>(net) ? "rnn" : "cnn"; }
};

nlohmann::json model_to_json(const StoredModel& model);
// Throws ConfigError on schema mismatch or malformed documents.
StoredModel model_from_json(const nlohmann::json& doc);

void save_model(const StoredModel& model, const std::filesystem::path& path);
StoredModel load_model(const std::filesystem::path& path);

// JSON helpers shared with the harness.
nlohmann::json matrix_to_json(const RealMatrix& m);
RealMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const RealVector& v);
RealVector vector_from_json(const nlohmann::json& j);

nlohmann::json set_to_json(const ActiveSet& set);
std::vector<ElementIndex> elements_from_json(const nlohmann::json& j);

}  // namespace soris
