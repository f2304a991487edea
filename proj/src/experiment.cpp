#include "soris/experiment.hpp"

#include <sstream>

#include "soris/cnn.hpp"
#include "soris/error.hpp"
#include "soris/interpolation.hpp"
#include "soris/rnn.hpp"

namespace soris {

std::vector<std::pair<EstimatedCsi, EstimatedCsi>> estimate_dataset(
    std::uint64_t seed, const std::vector<ChannelRealization>& channels,
    const ActiveSet& set, const PilotConfig& pilots, double sigma, Execution exec) {
  pilots.validate();
  if (sigma < 0.0) throw ConfigError("estimator error sigma must be >= 0");
  std::vector<std::pair<EstimatedCsi, EstimatedCsi>> out(channels.size());
  const RandomStream root(seed);
  const auto n = static_cast<long>(channels.size());
  auto one = [&](long i) {
    const RandomStream s = root.substream("estimate:" + std::to_string(i));
    auto est = estimate_active_set(s.substream("pilots"), channels[i], set, pilots);
    RandomStream ed = s.substream("error:down"), eu = s.substream("error:up");
    est.first.values = inject_estimator_error(ed, est.first.values, sigma);
    est.second.values = inject_estimator_error(eu, est.second.values, sigma);
    out[i] = std::move(est);
  };
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) one(i);
  }
  return out;
}

Corpus training_corpus(std::uint64_t seed, const Scenario& scenario,
                       const CorrelationModel& corr, int samples, Execution exec) {
  if (samples < 1) throw ConfigError("training needs at least one sample");
  Corpus c;
  c.channels = channel_dataset(split_seed(seed, "train"), corr, scenario.grid,
                               scenario.rician, static_cast<std::size_t>(samples), exec);
  auto est = estimate_dataset(split_seed(seed, "train-estimates"), c.channels, scenario.set,
                              scenario.pilots, scenario.sigma, exec);
  c.estimates.reserve(est.size());
  for (auto& e : est) c.estimates.push_back(std::move(e.first));
  return c;
}

StoredModel train_model(const ModelSpec& spec, const Corpus& corpus, const ActiveSet& set) {
  spec.training.validate();
  if (corpus.channels.size() != corpus.estimates.size())
    throw ContractError("corpus channels and estimates differ in count");
  set.require_proper();
  RandomStream init = RandomStream(spec.training.seed).substream("init");
  const GridSpec& grid = set.grid();

  if (spec.kind == "rnn") {
    if (spec.hidden < 1 || spec.dense < 1) throw ConfigError("layer widths must be positive");
    std::vector<TrainingExample<AugmentedInput>> data;
    data.reserve(corpus.channels.size());
    for (std::size_t i = 0; i < corpus.channels.size(); ++i)
      data.push_back({preprocess(corpus.estimates[i], set),
                      prediction_target(corpus.channels[i].downlink)});
    RnnModel net = RnnModel::initialized(init, spec.hidden, spec.dense, grid.size());
    const TrainingReport report = train_sgd(net, data, spec.training);
    return {std::move(net), set, spec.training, report.epoch_loss};
  }
  if (spec.kind == "cnn") {
    std::vector<TrainingExample<SurfaceImage>> data;
    data.reserve(corpus.channels.size());
    for (std::size_t i = 0; i < corpus.channels.size(); ++i)
      data.push_back({surface_image(corpus.estimates[i], set),
                      prediction_target(corpus.channels[i].downlink)});
    CnnModel net = CnnModel::initialized(init, grid.rows, grid.cols);
    const TrainingReport report = train_sgd(net, data, spec.training);
    return {std::move(net), set, spec.training, report.epoch_loss};
  }
  throw ConfigError("unknown network kind '" + spec.kind + "' (allowed: rnn, cnn)");
}

ModelPredictor::ModelPredictor(StoredModel model) : model_(std::move(model)) {}

FullSurfacePrediction ModelPredictor::predict(const EstimatedCsi& csi, const ActiveSet& set,
                                              const ComplexVector&) const {
  if (!(set.grid() == model_.set.grid()) || set.elements() != model_.set.elements())
    throw ConfigError("model was trained for a different active set");
  if (const auto* rnn = std::get_if<RnnModel>(&model_.net)) return predict_full(*rnn, csi, set);
  return cnn_predict(std::get<CnnModel>(model_.net), csi, set);
}

std::unique_ptr<ChannelPredictor> make_baseline(const std::string& name) {
  if (name == "ideal") return std::make_unique<IdealPredictor>();
  if (name == "li") return std::make_unique<InterpolationPredictor>();
  throw ConfigError("unknown baseline '" + name + "' (allowed: ideal, li)");
}

std::string TrainingRequest::key() const {
  std::ostringstream k;
  k.precision(17);
  const Scenario& s = scenario;
  k << model.kind << '|' << s.grid.rows << 'x' << s.grid.cols << '|' << s.grid.spacing << '|'
    << s.grid.wavelength << '|' << s.rician.kappa_db << ',' << s.rician.los_azimuth << ','
    << s.rician.los_elevation << '|';
  for (const auto& e : s.set.elements()) k << e.row << ':' << e.col << ';';
  if (model.kind == "rnn" || model.kind == "cnn") {
    const PilotConfig& p = s.pilots;
    k << '|' << p.pilots_down << ',' << p.pilots_up << ',' << p.pilot_power << ','
      << p.noise_variance << ',' << static_cast<int>(p.pattern) << '|' << s.sigma << '|'
      << model.hidden << ',' << model.dense << '|' << model.training.learning_rate << ','
      << model.training.epochs << ',' << model.training.batch_size << ','
      << model.training.train_samples << ',' << model.training.seed << '|' << seed;
  }
  return k.str();
}

const CorrelationModel& PredictorCache::correlation(const GridSpec& grid) {
  std::ostringstream k;
  k.precision(17);
  k << grid.rows << 'x' << grid.cols << '|' << grid.spacing << '|' << grid.wavelength;
  std::lock_guard lock(mutex_);
  auto& slot = corr_[k.str()];
  if (!slot) slot = std::make_shared<const CorrelationModel>(correlation_matrix(grid));
  return *slot;
}

std::shared_ptr<const ChannelPredictor> PredictorCache::get(const TrainingRequest& request) {
  const std::string key = request.key();
  {
    std::lock_guard lock(mutex_);
    if (auto it = predictors_.find(key); it != predictors_.end()) return it->second;
  }
  std::shared_ptr<const ChannelPredictor> made;
  if (request.model.kind == "rnn" || request.model.kind == "cnn") {
    const CorrelationModel& corr = correlation(request.scenario.grid);
    const Corpus corpus = training_corpus(request.seed, request.scenario, corr,
                                          request.model.training.train_samples);
    made = std::make_shared<const ModelPredictor>(
        train_model(request.model, corpus, request.scenario.set));
  } else {
    made = make_baseline(request.model.kind);
  }
  std::lock_guard lock(mutex_);
  return predictors_.emplace(key, std::move(made)).first->second;
}

std::vector<double> PredictorCache::loss_trace(const TrainingRequest& request) const {
  std::lock_guard lock(mutex_);
  auto it = predictors_.find(request.key());
  if (it == predictors_.end()) return {};
  if (const auto* m = dynamic_cast<const ModelPredictor*>(it->second.get()))
    return m->model().loss_trace;
  return {};
}

}  // namespace soris
