#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "soris/csv.hpp"
#include "soris/experiment.hpp"

namespace soris {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// SNR used for the BER-vs-size sweep; puts the 8x8 ideal-CSI BER near 0.13.
inline constexpr double kBerSnrDb = -37.5;

struct SelectionSpec {
  std::string method = "preset";  // preset | min-corr | diagonal | explicit
  std::string preset = "p8-fig10";
  int count = 8;
  std::optional<int> start;
  std::vector<ElementIndex> elements;
};

struct ExperimentConfig {
  int rows = 8;
  int cols = 8;
  double spacing_frac = 0.5;
  double kappa_db = 8.0;
  SelectionSpec selection;
  PilotConfig pilots;
  std::vector<double> sigmas{0.0};
  double train_sigma = 0.0;
  std::string predictor = "rnn";
  int hidden = 64;
  int dense = 128;
  TrainConfig training;
  int trials = 500;
  std::uint64_t seed_train = 1;
  std::uint64_t seed_eval = 2;
  std::string output_dir = "runs/default";

  GridSpec grid() const { return GridSpec::from_fraction(rows, cols, spacing_frac); }
};

struct ConfigDiagnostics {
  std::optional<ExperimentConfig> config;  // set only when there are no violations
  std::vector<std::string> violations;
  std::vector<std::string> defaults_applied;
  bool ok() const { return violations.empty(); }
};

// Checks every field and reports all problems at once; absent fields take
// their defaults and are listed in defaults_applied.
ConfigDiagnostics validate_config(const nlohmann::json& raw);
nlohmann::json config_to_json(const ExperimentConfig& config);
nlohmann::json read_json_file(const std::filesystem::path& path);

ActiveSet resolve_selection(const SelectionSpec& spec, const CorrelationModel& corr);
Scenario make_scenario(const ExperimentConfig& config, const ActiveSet& set, double sigma);
ModelSpec model_spec(const ExperimentConfig& config);

std::string sha256_file(const std::filesystem::path& path);

struct ArtifactRecord {
  std::string path;  // relative to the run directory when inside it
  std::string role;  // input | output
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::string tool_version = kToolVersion;
  int schema_version = kConfigSchemaVersion;
  std::string started;
  std::string finished;
  double wall_seconds = 0.0;
  std::vector<ArtifactRecord> artifacts;
  std::string status = "running";  // complete | failed
  std::string failed_stage;
  std::string failure;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

// correlation -> selection -> dataset -> estimation -> train -> evaluate,
// each written under config.output_dir together with manifest.json. On a
// stage failure the manifest is still written, marked failed, and a
// StageError is thrown.
RunManifest run_pipeline(const ExperimentConfig& config,
                         const std::optional<std::filesystem::path>& config_file = std::nullopt);

struct ReplicateOptions {
  std::filesystem::path output_dir = "replication";
  int trials = 500;
  int train_samples = 10000;
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = 0.5;
  int hidden = 64;
  int dense = 128;
  std::uint64_t seed_train = 1;
  std::uint64_t seed_eval = 2;
  std::int64_t bits = 100000;
  double snr_db = kBerSnrDb;
  std::vector<int> surface_sides{8, 16, 32};  // BER sweep, N = side^2
  PilotConfig pilots;
};

// Replaces fields named in `overrides` (same keys as ReplicateOptions).
ReplicateOptions apply_overrides(ReplicateOptions base, const nlohmann::json& overrides);

const std::vector<std::string>& figure_ids();

// Runs one recipe, writes <output_dir>/<id>.csv plus <id>_manifest.json and
// returns the table.
Table replicate_figure(const std::string& id, const ReplicateOptions& options,
                       PredictorCache* cache = nullptr);

// Applies SORIS_THREADS to the OpenMP runtime; returns the worker cap.
int configure_threads();

}  // namespace soris
