#pragma once

#include <span>
#include <vector>

#include "soris/params.hpp"
#include "soris/predictor.hpp"
#include "soris/random.hpp"

namespace soris {

// Weights of the simple recurrent layer and the two dense layers.
struct RnnParams {
  RealMatrix input_weights;      // R_h x 2
  RealMatrix recurrent_weights;  // R_h x R_h
  RealVector hidden_bias;        // R_h
  RealMatrix dense1_weights;     // R_d1 x R_h
  RealVector dense1_bias;        // R_d1
  RealMatrix dense2_weights;     // 2N x R_d1
  RealVector dense2_bias;        // 2N

  template <class F>
  void visit(F&& f) {
    f(input_weights); f(recurrent_weights); f(hidden_bias);
    f(dense1_weights); f(dense1_bias); f(dense2_weights); f(dense2_bias);
  }
  template <class F>
  void visit(F&& f) const {
    f(input_weights); f(recurrent_weights); f(hidden_bias);
    f(dense1_weights); f(dense1_bias); f(dense2_weights); f(dense2_bias);
  }
  template <class A, class B, class F>
  static void visit2(A& a, B& b, F&& f) {
    f(a.input_weights, b.input_weights);
    f(a.recurrent_weights, b.recurrent_weights);
    f(a.hidden_bias, b.hidden_bias);
    f(a.dense1_weights, b.dense1_weights);
    f(a.dense1_bias, b.dense1_bias);
    f(a.dense2_weights, b.dense2_weights);
    f(a.dense2_bias, b.dense2_bias);
  }
};

// Activations kept from a forward pass over a batch (columns = samples).
struct RnnTrace {
  std::vector<RealMatrix> inputs;  // S entries, 2 x B
  std::vector<RealMatrix> states;  // S+1 entries, R_h x B, states[0] = 0
  RealMatrix dense_pre;            // R_d1 x B
  RealMatrix dense_act;            // R_d1 x B
  RealMatrix outputs;              // 2N x B
};

class RnnModel {
public:
  using Input = AugmentedInput;
  using Params = RnnParams;

  RnnModel() = default;
  // All-zero weights.
  RnnModel(int hidden, int dense, int surface_size);

  // Keras SimpleRNN/Dense defaults: Glorot-uniform kernels, orthogonal
  // recurrent kernel, zero biases.
  static RnnModel initialized(RandomStream& rng, int hidden, int dense,
                              int surface_size);

  int hidden() const noexcept { return static_cast<int>(params.hidden_bias.size()); }
  int dense() const noexcept { return static_cast<int>(params.dense1_bias.size()); }
  int surface_size() const noexcept { return static_cast<int>(params.dense2_bias.size() / 2); }
  int outputs() const noexcept { return static_cast<int>(params.dense2_bias.size()); }

  // Throws ContractError on inconsistent or non-finite weights.
  void validate() const;

  RnnTrace forward_batch(std::span<const AugmentedInput* const> batch) const;

  // Gradient of mse_loss(trace.outputs, targets) with respect to every weight.
  RnnParams backward(const RnnTrace& trace, const RealMatrix& targets) const;

  // Interface used by the SGD loop and the gradient checker.
  double loss(const AugmentedInput& input, const RealVector& target) const;
  RealVector flat_gradient(const AugmentedInput& input, const RealVector& target) const;
  RealVector flat_params() const { return flatten(params); }
  void set_flat_params(const RealVector& flat) { unflatten(params, flat); }
  double loss_and_gradient(std::span<const AugmentedInput* const> inputs,
                           std::span<const RealVector* const> targets,
                           RnnParams& grad) const;

  RnnParams params;
};

// Mean over the batch of the per-sample mean squared error over all outputs.
double mse_loss(const RealMatrix& outputs, const RealMatrix& targets);

// Single-sample forward pass; optionally returns the trace for backward().
FullSurfacePrediction rnn_forward(const RnnModel& model, const AugmentedInput& input,
                                  RnnTrace* trace = nullptr);

RnnParams rnn_backward(const RnnModel& model, const AugmentedInput& input,
                       const RealVector& target);

// preprocess -> forward -> overwrite the active positions with the estimates.
FullSurfacePrediction predict_full(const RnnModel& model, const EstimatedCsi& csi,
                                   const ActiveSet& set);

class RnnPredictor final : public ChannelPredictor {
public:
  explicit RnnPredictor(const RnnModel& model) : model_(model) {}
  std::string name() const override { return "rnn"; }
  FullSurfacePrediction predict(const EstimatedCsi& csi, const ActiveSet& set,
                                const ComplexVector&) const override {
    return predict_full(model_, csi, set);
  }

private:
  const RnnModel& model_;
};

}  // namespace soris
