#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "soris/evaluation.hpp"
#include "soris/model_io.hpp"

namespace soris {

// Estimates of a channel dataset. Sample i draws pilots and injected error
// from substream "estimate:i" of `seed`.
std::vector<std::pair<EstimatedCsi, EstimatedCsi>> estimate_dataset(
    std::uint64_t seed, const std::vector<ChannelRealization>& channels,
    const ActiveSet& set, const PilotConfig& pilots, double sigma,
    Execution exec = Execution::parallel);

// True channels and their downlink estimates, the data a predictor is fit on.
struct Corpus {
  std::vector<ChannelRealization> channels;
  std::vector<EstimatedCsi> estimates;
};

// Channels come from substream "train" of `seed`, estimates from
// "train-estimates".
Corpus training_corpus(std::uint64_t seed, const Scenario& scenario,
                       const CorrelationModel& corr, int samples,
                       Execution exec = Execution::parallel);

struct ModelSpec {
  std::string kind = "rnn";  // rnn | cnn
  int hidden = 64;           // R_h
  int dense = 128;           // R_d1
  TrainConfig training;
};

// Initializes from substream "init" of training.seed, then runs SGD on the
// downlink targets of the corpus.
StoredModel train_model(const ModelSpec& spec, const Corpus& corpus, const ActiveSet& set);

// Owns a trained network and applies it through the common interface.
class ModelPredictor final : public ChannelPredictor {
public:
  explicit ModelPredictor(StoredModel model);
  std::string name() const override { return model_.kind(); }
  FullSurfacePrediction predict(const EstimatedCsi& csi, const ActiveSet& set,
                                const ComplexVector& truth) const override;
  const StoredModel& model() const noexcept { return model_; }

private:
  StoredModel model_;
};

// "ideal" or "li"; throws ConfigError otherwise.
std::unique_ptr<ChannelPredictor> make_baseline(const std::string& name);

inline const std::vector<std::string>& predictor_names() {
  static const std::vector<std::string> names{"rnn", "cnn", "li", "ideal"};
  return names;
}

// Everything that determines a trained predictor.
struct TrainingRequest {
  Scenario scenario;  // sigma = error level injected into the training data
  ModelSpec model;    // kind may also be "li" or "ideal"
  std::uint64_t seed = 1;
  std::string key() const;
};

// Memoizes correlation models and trained predictors within one process.
class PredictorCache {
public:
  const CorrelationModel& correlation(const GridSpec& grid);
  std::shared_ptr<const ChannelPredictor> get(const TrainingRequest& request);
  // Training loss trace of a cached network, empty for baselines.
  std::vector<double> loss_trace(const TrainingRequest& request) const;

private:
  std::map<std::string, std::shared_ptr<const CorrelationModel>> corr_;
  std::map<std::string, std::shared_ptr<const ChannelPredictor>> predictors_;
  mutable std::mutex mutex_;
};

}  // namespace soris
