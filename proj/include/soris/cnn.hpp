#pragma once

#include <span>

#include "soris/params.hpp"
#include "soris/predictor.hpp"
#include "soris/random.hpp"

namespace soris {

// Convolutional reference predictor: two 3x3 zero-padded convolutions
// (8 then 16 channels, ReLU) and a dense layer onto the 2N outputs.
struct CnnParams {
  RealMatrix conv1_weights;  // 8 x (2*9)
  RealVector conv1_bias;
  RealMatrix conv2_weights;  // 16 x (8*9)
  RealVector conv2_bias;
  RealMatrix dense_weights;  // 2N x (16*N)
  RealVector dense_bias;

  template <class F>
  void visit(F&& f) {
    f(conv1_weights); f(conv1_bias); f(conv2_weights); f(conv2_bias);
    f(dense_weights); f(dense_bias);
  }
  template <class F>
  void visit(F&& f) const {
    f(conv1_weights); f(conv1_bias); f(conv2_weights); f(conv2_bias);
    f(dense_weights); f(dense_bias);
  }
  template <class A, class B, class F>
  static void visit2(A& a, B& b, F&& f) {
    f(a.conv1_weights, b.conv1_weights);
    f(a.conv1_bias, b.conv1_bias);
    f(a.conv2_weights, b.conv2_weights);
    f(a.conv2_bias, b.conv2_bias);
    f(a.dense_weights, b.dense_weights);
    f(a.dense_bias, b.dense_bias);
  }
};

// Two-channel surface image (magnitude, phase), zero at inactive elements.
// Columns follow the flat element order.
struct SurfaceImage {
  RealMatrix pixels;  // 2 x N
};

SurfaceImage surface_image(const EstimatedCsi& csi, const ActiveSet& set);

class CnnModel {
public:
  using Input = SurfaceImage;
  using Params = CnnParams;

  static constexpr int kConv1Channels = 8;
  static constexpr int kConv2Channels = 16;

  CnnModel() = default;
  // All-zero weights for a rows x cols surface.
  CnnModel(int rows, int cols);
  static CnnModel initialized(RandomStream& rng, int rows, int cols);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int surface_size() const noexcept { return rows_ * cols_; }

  void validate() const;

  RealVector forward(const SurfaceImage& input) const;
  // Smallest |pre-activation| over both ReLU layers. The loss is smooth
  // within roughly this distance of the current weights.
  double relu_margin(const SurfaceImage& input) const;

  double loss(const SurfaceImage& input, const RealVector& target) const;
  RealVector flat_gradient(const SurfaceImage& input, const RealVector& target) const;
  RealVector flat_params() const { return flatten(params); }
  void set_flat_params(const RealVector& flat) { unflatten(params, flat); }
  double loss_and_gradient(std::span<const SurfaceImage* const> inputs,
                           std::span<const RealVector* const> targets,
                           CnnParams& grad) const;

  CnnParams params;

private:
  struct Trace;
  // Accumulates `weight` * d(sample MSE) into grad; returns the sample MSE.
  double accumulate(const SurfaceImage& input, const RealVector& target,
                    double weight, CnnParams& grad) const;

  int rows_ = 0;
  int cols_ = 0;
};

FullSurfacePrediction cnn_predict(const CnnModel& model, const EstimatedCsi& csi,
                                  const ActiveSet& set);

class CnnPredictor final : public ChannelPredictor {
public:
  explicit CnnPredictor(const CnnModel& model) : model_(model) {}
  std::string name() const override { return "cnn"; }
  FullSurfacePrediction predict(const EstimatedCsi& csi, const ActiveSet& set,
                                const ComplexVector&) const override {
    return cnn_predict(model_, csi, set);
  }

private:
  const CnnModel& model_;
};

}  // namespace soris
