#pragma once

#include <cmath>
#include <cstdint>
#include <concepts>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "soris/error.hpp"
#include "soris/params.hpp"
#include "soris/random.hpp"

namespace soris {

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 100;
  int batch_size = 32;
  int train_samples = 10000;
  std::uint64_t seed = 1;

  void validate() const;
};

template <class Input>
struct TrainingExample {
  Input input;
  RealVector target;
};

struct TrainingReport {
  std::vector<double> epoch_loss;  // mean training loss of each epoch
  double final_loss() const { return epoch_loss.empty() ? NAN : epoch_loss.back(); }
};

// Minimal surface the SGD loop needs from a network.
template <class Net>
concept SgdTrainable = requires(const Net& net, Net& mut,
                                std::span<const typename Net::Input* const> in,
                                std::span<const RealVector* const> tg,
                                typename Net::Params& grad) {
  { net.loss_and_gradient(in, tg, grad) } -> std::convertible_to<double>;
  { mut.params } -> std::convertible_to<typename Net::Params&>;
};

// Fisher-Yates on the stream's own draws, identical on every platform.
inline void shuffle_indices(std::vector<std::size_t>& idx, RandomStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

// Mini-batch SGD with per-epoch reshuffling. The network is updated in place.
// Throws TrainingDivergedError when the loss stops being finite.
template <SgdTrainable Net>
TrainingReport train_sgd(Net& net,
                         const std::vector<TrainingExample<typename Net::Input>>& data,
                         const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw ConfigError("training dataset is empty");
  RandomStream order_rng = RandomStream(config.seed).substream("shuffle");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const typename Net::Input*> inputs;
  std::vector<const RealVector*> targets;
  typename Net::Params grad;

  TrainingReport report;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, order_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      inputs.clear();
      targets.clear();
      for (std::size_t k = start; k < stop; ++k) {
        inputs.push_back(&data[order[k]].input);
        targets.push_back(&data[order[k]].target);
      }
      const double loss = net.loss_and_gradient(inputs, targets, grad);
      if (!std::isfinite(loss) || !all_finite(grad))
        throw TrainingDivergedError(
            epoch, "training diverged in epoch " + std::to_string(epoch + 1) +
                       "; lower the learning rate");
      total += loss * static_cast<double>(stop - start);
      sgd_update(net.params, grad, config.learning_rate);
    }
    report.epoch_loss.push_back(total / static_cast<double>(data.size()));
  }
  return report;
}

}  // namespace soris
