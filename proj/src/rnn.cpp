#include "soris/rnn.hpp"

#include <string>

#include <Eigen/QR>

#include "soris/error.hpp"

namespace soris {

RnnModel::RnnModel(int hidden, int dense, int surface_size) {
  if (hidden < 1 || dense < 1 || surface_size < 1)
    throw ConfigError("recurrent model dimensions must be positive");
  params.input_weights = RealMatrix::Zero(hidden, 2);
  params.recurrent_weights = RealMatrix::Zero(hidden, hidden);
  params.hidden_bias = RealVector::Zero(hidden);
  params.dense1_weights = RealMatrix::Zero(dense, hidden);
  params.dense1_bias = RealVector::Zero(dense);
  params.dense2_weights = RealMatrix::Zero(2 * surface_size, dense);
  params.dense2_bias = RealVector::Zero(2 * surface_size);
}

RnnModel RnnModel::initialized(RandomStream& rng, int hidden, int dense,
                               int surface_size) {
  RnnModel m(hidden, dense, surface_size);
  glorot_uniform(m.params.input_weights, rng, 2, hidden);

  RealMatrix g(hidden, hidden);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(hidden, hidden);
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < hidden; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  m.params.recurrent_weights = q;

  glorot_uniform(m.params.dense1_weights, rng, hidden, dense);
  glorot_uniform(m.params.dense2_weights, rng, dense, 2 * surface_size);
  return m;
}

void RnnModel::validate() const {
  const auto h = params.hidden_bias.size();
  const auto d = params.dense1_bias.size();
  const auto o = params.dense2_bias.size();
  const bool shapes_ok =
      h > 0 && d > 0 && o > 0 && o % 2 == 0 &&
      params.input_weights.rows() == h && params.input_weights.cols() == 2 &&
      params.recurrent_weights.rows() == h && params.recurrent_weights.cols() == h &&
      params.dense1_weights.rows() == d && params.dense1_weights.cols() == h &&
      params.dense2_weights.rows() == o && params.dense2_weights.cols() == d;
  if (!shapes_ok) throw ContractError("recurrent model weight shapes are inconsistent");
  if (!all_finite(params)) throw ContractError("recurrent model has non-finite weights");
}

RnnTrace RnnModel::forward_batch(std::span<const AugmentedInput* const> batch) const {
  if (batch.empty()) throw ContractError("empty batch");
  const int steps = batch.front()->steps();
  const auto b = static_cast<Eigen::Index>(batch.size());
  for (const auto* in : batch) {
    if (in->steps() != steps || in->sequence.rows() != 2)
      throw ContractError("batch inputs must share the same 2 x S shape");
  }
  if (steps < 1) throw ContractError("input sequence is empty");

  RnnTrace tr;
  tr.inputs.reserve(steps);
  tr.states.reserve(steps + 1);
  tr.states.push_back(RealMatrix::Zero(hidden(), b));
  for (int t = 0; t < steps; ++t) {
    RealMatrix x(2, b);
    for (Eigen::Index j = 0; j < b; ++j) x.col(j) = batch[j]->sequence.col(t);
    RealMatrix a = params.input_weights * x + params.recurrent_weights * tr.states.back();
    a.colwise() += params.hidden_bias;
    tr.states.push_back(a.array().tanh().matrix());
    tr.inputs.push_back(std::move(x));
  }
  tr.dense_pre = params.dense1_weights * tr.states.back();
  tr.dense_pre.colwise() += params.dense1_bias;
  tr.dense_act = tr.dense_pre.cwiseMax(0.0);
  tr.outputs = params.dense2_weights * tr.dense_act;
  tr.outputs.colwise() += params.dense2_bias;
  return tr;
}

RnnParams RnnModel::backward(const RnnTrace& tr, const RealMatrix& targets) const {
  if (targets.rows() != tr.outputs.rows() || targets.cols() != tr.outputs.cols())
    throw ContractError("target shape does not match the network outputs");
  const double scale = 2.0 / (static_cast<double>(tr.outputs.rows()) * tr.outputs.cols());
  RnnParams g;
  const RealMatrix d_out = scale * (tr.outputs - targets);
  g.dense2_weights = d_out * tr.dense_act.transpose();
  g.dense2_bias = d_out.rowwise().sum();
  const RealMatrix d_pre =
      ((params.dense2_weights.transpose() * d_out).array() *
       (tr.dense_pre.array() > 0.0).cast<double>())
          .matrix();
  g.dense1_weights = d_pre * tr.states.back().transpose();
  g.dense1_bias = d_pre.rowwise().sum();

  g.input_weights = RealMatrix::Zero(params.input_weights.rows(), 2);
  g.recurrent_weights = RealMatrix::Zero(hidden(), hidden());
  g.hidden_bias = RealVector::Zero(hidden());
  RealMatrix d_state = params.dense1_weights.transpose() * d_pre;
  for (auto t = static_cast<int>(tr.inputs.size()); t >= 1; --t) {
    const RealMatrix& s = tr.states[t];
    const RealMatrix d_a = (d_state.array() * (1.0 - s.array().square())).matrix();
    g.input_weights.noalias() += d_a * tr.inputs[t - 1].transpose();
    g.recurrent_weights.noalias() += d_a * tr.states[t - 1].transpose();
    g.hidden_bias += d_a.rowwise().sum();
    if (t > 1) d_state = params.recurrent_weights.transpose() * d_a;
  }
  return g;
}

double mse_loss(const RealMatrix& outputs, const RealMatrix& targets) {
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
    throw ContractError("output and target shapes differ");
  return (outputs - targets).squaredNorm() /
         (static_cast<double>(outputs.rows()) * outputs.cols());
}

double RnnModel::loss(const AugmentedInput& input, const RealVector& target) const {
  const AugmentedInput* p = &input;
  return mse_loss(forward_batch({&p, 1}).outputs, target);
}

RealVector RnnModel::flat_gradient(const AugmentedInput& input,
                                   const RealVector& target) const {
  const AugmentedInput* p = &input;
  return flatten(backward(forward_batch({&p, 1}), target));
}

double RnnModel::loss_and_gradient(std::span<const AugmentedInput* const> inputs,
                                   std::span<const RealVector* const> targets,
                                   RnnParams& grad) const {
  const RnnTrace tr = forward_batch(inputs);
  RealMatrix t(tr.outputs.rows(), tr.outputs.cols());
  for (Eigen::Index j = 0; j < t.cols(); ++j) t.col(j) = *targets[j];
  grad = backward(tr, t);
  return mse_loss(tr.outputs, t);
}

FullSurfacePrediction rnn_forward(const RnnModel& model, const AugmentedInput& input,
                                  RnnTrace* trace) {
  const AugmentedInput* p = &input;
  RnnTrace tr = model.forward_batch({&p, 1});
  FullSurfacePrediction out = decode_outputs(tr.outputs.col(0));
  if (trace) *trace = std::move(tr);
  return out;
}

RnnParams rnn_backward(const RnnModel& model, const AugmentedInput& input,
                       const RealVector& target) {
  const AugmentedInput* p = &input;
  return model.backward(model.forward_batch({&p, 1}), target);
}

FullSurfacePrediction predict_full(const RnnModel& model, const EstimatedCsi& csi,
                                   const ActiveSet& set) {
  if (model.surface_size() != set.grid().size())
    throw ContractError("model predicts " + std::to_string(model.surface_size()) +
                        " elements but the surface has " +
                        std::to_string(set.grid().size()));
  FullSurfacePrediction out = rnn_forward(model, preprocess(csi, set));
  overwrite_measured(out, csi, set);
  return out;
}

}  // namespace soris
