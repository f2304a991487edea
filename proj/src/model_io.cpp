#include "soris/model_io.hpp"

#include <fstream>

#include "soris/error.hpp"

namespace soris {

using nlohmann::json;

json matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a nested array for a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw ConfigError("ragged matrix in model document");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const RealVector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

RealVector vector_from_json(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const RealVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

json set_to_json(const ActiveSet& set) {
  json out = json::array();
  for (const auto& e : set.elements()) out.push_back({e.row, e.col});
  return out;
}

std::vector<ElementIndex> elements_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("active set must be a list of [row, col] pairs");
  std::vector<ElementIndex> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw ConfigError("active set entries must be [row, col] pairs");
    out.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  return out;
}

namespace {

json rnn_weights(const RnnParams& p) {
  return {{"input_weights", matrix_to_json(p.input_weights)},
          {"recurrent_weights", matrix_to_json(p.recurrent_weights)},
          {"hidden_bias", vector_to_json(p.hidden_bias)},
          {"dense1_weights", matrix_to_json(p.dense1_weights)},
          {"dense1_bias", vector_to_json(p.dense1_bias)},
          {"dense2_weights", matrix_to_json(p.dense2_weights)},
          {"dense2_bias", vector_to_json(p.dense2_bias)}};
}

json cnn_weights(const CnnParams& p) {
  return {{"conv1_weights", matrix_to_json(p.conv1_weights)},
          {"conv1_bias", vector_to_json(p.conv1_bias)},
          {"conv2_weights", matrix_to_json(p.conv2_weights)},
          {"conv2_bias", vector_to_json(p.conv2_bias)},
          {"dense_weights", matrix_to_json(p.dense_weights)},
          {"dense_bias", vector_to_json(p.dense_bias)}};
}

}  // namespace

json model_to_json(const StoredModel& model) {
  const GridSpec& g = model.set.grid();
  json arch = {{"kind", model.kind()},
               {"n", g.size()},
               {"s", model.set.size()},
               {"rows", g.rows},
               {"cols", g.cols},
               {"spacing_frac", g.spacing_fraction()},
               {"wavelength", g.wavelength},
               {"active_set", set_to_json(model.set)}};
  json weights;
  if (const auto* rnn = std::get_if<RnnModel>(&model.net)) {
    arch["r_h"] = rnn->hidden();
    arch["r_d1"] = rnn->dense();
    weights = rnn_weights(rnn->params);
  } else {
    weights = cnn_weights(std::get<CnnModel>(model.net).params);
  }
  const double final_loss = model.loss_trace.empty() ? 0.0 : model.loss_trace.back();
  return {{"schema_version", kModelSchemaVersion},
          {"architecture", arch},
          {"weights", weights},
          {"training",
           {{"lr", model.training.learning_rate},
            {"epochs", model.training.epochs},
            {"batch", model.training.batch_size},
            {"train_samples", model.training.train_samples},
            {"seed", model.training.seed},
            {"final_loss", final_loss},
            {"loss_trace", model.loss_trace}}}};
}

StoredModel model_from_json(const json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kModelSchemaVersion)
      throw ConfigError("unsupported model schema version " +
                        doc.at("schema_version").dump());
    const json& arch = doc.at("architecture");
    const GridSpec grid{arch.at("rows").get<int>(), arch.at("cols").get<int>(),
                        arch.at("spacing_frac").get<double>() *
                            arch.at("wavelength").get<double>(),
                        arch.at("wavelength").get<double>()};
    grid.validate();
    StoredModel out{RnnModel{}, ActiveSet(grid, elements_from_json(arch.at("active_set"))),
                    TrainConfig{}, {}};
    const json& w = doc.at("weights");
    const std::string kind = arch.value("kind", "rnn");
    if (kind == "rnn") {
      RnnModel m;
      m.params.input_weights = matrix_from_json(w.at("input_weights"));
      m.params.recurrent_weights = matrix_from_json(w.at("recurrent_weights"));
      m.params.hidden_bias = vector_from_json(w.at("hidden_bias"));
      m.params.dense1_weights = matrix_from_json(w.at("dense1_weights"));
      m.params.dense1_bias = vector_from_json(w.at("dense1_bias"));
      m.params.dense2_weights = matrix_from_json(w.at("dense2_weights"));
      m.params.dense2_bias = vector_from_json(w.at("dense2_bias"));
      m.validate();
      if (m.surface_size() != grid.size())
        throw ConfigError("model output size does not match its grid");
      out.net = std::move(m);
    } else if (kind == "cnn") {
      CnnModel m(grid.rows, grid.cols);
      m.params.conv1_weights = matrix_from_json(w.at("conv1_weights"));
      m.params.conv1_bias = vector_from_json(w.at("conv1_bias"));
      m.params.conv2_weights = matrix_from_json(w.at("conv2_weights"));
      m.params.conv2_bias = vector_from_json(w.at("conv2_bias"));
      m.params.dense_weights = matrix_from_json(w.at("dense_weights"));
      m.params.dense_bias = vector_from_json(w.at("dense_bias"));
      m.validate();
      out.net = std::move(m);
    } else {
      throw ConfigError("unknown model kind '" + kind + "'");
    }
    const json& t = doc.at("training");
    out.training.learning_rate = t.at("lr").get<double>();
    out.training.epochs = t.at("epochs").get<int>();
    out.training.batch_size = t.at("batch").get<int>();
    out.training.train_samples = t.value("train_samples", out.training.train_samples);
    out.training.seed = t.at("seed").get<std::uint64_t>();
    out.loss_trace = t.value("loss_trace", std::vector<double>{});
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model document: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("invalid model weights: ") + e.what());
  }
}

void save_model(const StoredModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model to " + path.string());
  out << model_to_json(model).dump(1) << '\n';
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read model from " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace soris
