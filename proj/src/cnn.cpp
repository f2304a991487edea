#include "soris/cnn.hpp"

#include <algorithm>
#include <string>

#include "soris/error.hpp"

namespace soris {

namespace {

// (channels*9) x N patch matrix; row c*9 + (dy+1)*3 + (dx+1).
RealMatrix im2col(const RealMatrix& img, int rows, int cols) {
  const auto channels = img.rows();
  RealMatrix col = RealMatrix::Zero(channels * 9, img.cols());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = r * cols + c;
      for (int dy = -1; dy <= 1; ++dy) {
        const int rr = r + dy;
        if (rr < 0 || rr >= rows) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int cc = c + dx;
          if (cc < 0 || cc >= cols) continue;
          const int q = rr * cols + cc;
          const int tap = (dy + 1) * 3 + (dx + 1);
          for (Eigen::Index ch = 0; ch < channels; ++ch)
            col(ch * 9 + tap, p) = img(ch, q);
        }
      }
    }
  }
  return col;
}

// Adjoint of im2col.
RealMatrix col2im(const RealMatrix& col, Eigen::Index channels, int rows, int cols) {
  RealMatrix img = RealMatrix::Zero(channels, col.cols());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = r * cols + c;
      for (int dy = -1; dy <= 1; ++dy) {
        const int rr = r + dy;
        if (rr < 0 || rr >= rows) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int cc = c + dx;
          if (cc < 0 || cc >= cols) continue;
          const int q = rr * cols + cc;
          const int tap = (dy + 1) * 3 + (dx + 1);
          for (Eigen::Index ch = 0; ch < channels; ++ch)
            img(ch, q) += col(ch * 9 + tap, p);
        }
      }
    }
  }
  return img;
}

}  // namespace

struct CnnModel::Trace {
  RealMatrix col1, pre1, act1, col2, pre2;
  RealVector flat, outputs;
};

SurfaceImage surface_image(const EstimatedCsi& csi, const ActiveSet& set) {
  if (csi.values.size() != set.size())
    throw ContractError("estimated CSI and active set lengths differ");
  SurfaceImage img;
  img.pixels = RealMatrix::Zero(2, set.grid().size());
  for (int i = 0; i < set.size(); ++i) {
    const int k = flat_offset(set.grid(), set[i]);
    img.pixels(0, k) = std::abs(csi.values[i]);
    img.pixels(1, k) = phase_of(csi.values[i]);
  }
  return img;
}

CnnModel::CnnModel(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw ConfigError("CNN surface dimensions must be positive");
  const int n = rows * cols;
  params.conv1_weights = RealMatrix::Zero(kConv1Channels, 2 * 9);
  params.conv1_bias = RealVector::Zero(kConv1Channels);
  params.conv2_weights = RealMatrix::Zero(kConv2Channels, kConv1Channels * 9);
  params.conv2_bias = RealVector::Zero(kConv2Channels);
  params.dense_weights = RealMatrix::Zero(2 * n, kConv2Channels * n);
  params.dense_bias = RealVector::Zero(2 * n);
}

CnnModel CnnModel::initialized(RandomStream& rng, int rows, int cols) {
  CnnModel m(rows, cols);
  const int n = rows * cols;
  glorot_uniform(m.params.conv1_weights, rng, 2 * 9, kConv1Channels * 9);
  glorot_uniform(m.params.conv2_weights, rng, kConv1Channels * 9, kConv2Channels * 9);
  glorot_uniform(m.params.dense_weights, rng, kConv2Channels * n, 2 * n);
  return m;
}

void CnnModel::validate() const {
  const int n = surface_size();
  const bool ok = n > 0 && params.conv1_weights.rows() == kConv1Channels &&
                  params.conv1_weights.cols() == 18 &&
                  params.conv1_bias.size() == kConv1Channels &&
                  params.conv2_weights.rows() == kConv2Channels &&
                  params.conv2_weights.cols() == kConv1Channels * 9 &&
                  params.conv2_bias.size() == kConv2Channels &&
                  params.dense_weights.rows() == 2 * n &&
                  params.dense_weights.cols() == kConv2Channels * n &&
                  params.dense_bias.size() == 2 * n;
  if (!ok) throw ContractError("CNN weight shapes are inconsistent");
  if (!all_finite(params)) throw ContractError("CNN has non-finite weights");
}

RealVector CnnModel::forward(const SurfaceImage& input) const {
  if (input.pixels.rows() != 2 || input.pixels.cols() != surface_size())
    throw ContractError("CNN input must be a 2 x N image");
  RealMatrix a1 = params.conv1_weights * im2col(input.pixels, rows_, cols_);
  a1.colwise() += params.conv1_bias;
  a1 = a1.cwiseMax(0.0);
  RealMatrix a2 = params.conv2_weights * im2col(a1, rows_, cols_);
  a2.colwise() += params.conv2_bias;
  a2 = a2.cwiseMax(0.0);
  return params.dense_weights * a2.reshaped() + params.dense_bias;
}

double CnnModel::relu_margin(const SurfaceImage& input) const {
  if (input.pixels.rows() != 2 || input.pixels.cols() != surface_size())
    throw ContractError("CNN input must be a 2 x N image");
  RealMatrix pre1 = params.conv1_weights * im2col(input.pixels, rows_, cols_);
  pre1.colwise() += params.conv1_bias;
  RealMatrix pre2 = params.conv2_weights * im2col(pre1.cwiseMax(0.0), rows_, cols_);
  pre2.colwise() += params.conv2_bias;
  return std::min(pre1.cwiseAbs().minCoeff(), pre2.cwiseAbs().minCoeff());
}

double CnnModel::accumulate(const SurfaceImage& input, const RealVector& target,
                            double weight, CnnParams& g) const {
  if (input.pixels.rows() != 2 || input.pixels.cols() != surface_size())
    throw ContractError("CNN input must be a 2 x N image");
  Trace t;
  t.col1 = im2col(input.pixels, rows_, cols_);
  t.pre1 = params.conv1_weights * t.col1;
  t.pre1.colwise() += params.conv1_bias;
  t.act1 = t.pre1.cwiseMax(0.0);
  t.col2 = im2col(t.act1, rows_, cols_);
  t.pre2 = params.conv2_weights * t.col2;
  t.pre2.colwise() += params.conv2_bias;
  t.flat = t.pre2.cwiseMax(0.0).reshaped();
  t.outputs = params.dense_weights * t.flat + params.dense_bias;
  if (target.size() != t.outputs.size())
    throw ContractError("target length does not match the CNN outputs");

  const RealVector diff = t.outputs - target;
  const double outputs = static_cast<double>(diff.size());
  const RealVector d_out = (weight * 2.0 / outputs) * diff;
  g.dense_weights.noalias() += d_out * t.flat.transpose();
  g.dense_bias += d_out;

  RealMatrix d_pre2 = (params.dense_weights.transpose() * d_out)
                          .reshaped(kConv2Channels, surface_size());
  d_pre2 = (d_pre2.array() * (t.pre2.array() > 0.0).cast<double>()).matrix();
  g.conv2_weights.noalias() += d_pre2 * t.col2.transpose();
  g.conv2_bias += d_pre2.rowwise().sum();

  RealMatrix d_pre1 = col2im(params.conv2_weights.transpose() * d_pre2,
                             kConv1Channels, rows_, cols_);
  d_pre1 = (d_pre1.array() * (t.pre1.array() > 0.0).cast<double>()).matrix();
  g.conv1_weights.noalias() += d_pre1 * t.col1.transpose();
  g.conv1_bias += d_pre1.rowwise().sum();
  return diff.squaredNorm() / outputs;
}

double CnnModel::loss(const SurfaceImage& input, const RealVector& target) const {
  const RealVector out = forward(input);
  if (target.size() != out.size())
    throw ContractError("target length does not match the CNN outputs");
  return (out - target).squaredNorm() / static_cast<double>(out.size());
}

RealVector CnnModel::flat_gradient(const SurfaceImage& input,
                                   const RealVector& target) const {
  CnnParams g = zeros_like(params);
  accumulate(input, target, 1.0, g);
  return flatten(g);
}

double CnnModel::loss_and_gradient(std::span<const SurfaceImage* const> inputs,
                                   std::span<const RealVector* const> targets,
                                   CnnParams& grad) const {
  if (inputs.empty() || inputs.size() != targets.size())
    throw ContractError("batch inputs and targets must be nonempty and aligned");
  grad = zeros_like(params);
  const double w = 1.0 / static_cast<double>(inputs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    total += accumulate(*inputs[i], *targets[i], w, grad);
  return total * w;
}

FullSurfacePrediction cnn_predict(const CnnModel& model, const EstimatedCsi& csi,
                                  const ActiveSet& set) {
  if (model.rows() != set.grid().rows || model.cols() != set.grid().cols)
    throw ContractError("CNN was built for a different surface size");
  FullSurfacePrediction out = decode_outputs(model.forward(surface_image(csi, set)));
  overwrite_measured(out, csi, set);
  return out;
}

}  // namespace soris
