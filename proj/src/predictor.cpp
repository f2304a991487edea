#include "soris/predictor.hpp"

#include <cmath>

#include "soris/error.hpp"

namespace soris {

ComplexVector FullSurfacePrediction::complex_view() const {
  ComplexVector h(magnitudes.size());
  for (Eigen::Index i = 0; i < h.size(); ++i)
    h[i] = std::polar(magnitudes[i], phases[i]);
  return h;
}

FullSurfacePrediction FullSurfacePrediction::from_complex(const ComplexVector& h) {
  FullSurfacePrediction p;
  p.magnitudes.resize(h.size());
  p.phases.resize(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    p.magnitudes[i] = std::abs(h[i]);
    p.phases[i] = phase_of(h[i]);
  }
  return p;
}

AugmentedInput preprocess(const EstimatedCsi& csi, const ActiveSet& set) {
  if (csi.values.size() != set.size())
    throw ContractError("estimated CSI holds " + std::to_string(csi.values.size()) +
                        " values for an active set of " + std::to_string(set.size()));
  const int s = set.size();
  const double n = set.grid().size();
  AugmentedInput in;
  in.sequence.resize(2, s);
  in.stamps.resize(s);
  for (int i = 0; i < s; ++i) {
    const double z = flat_index(set.grid(), set[i]) / n;
    in.stamps[i] = z;
    in.sequence(0, i) = std::abs(csi.values[i]) * z;
    in.sequence(1, i) = phase_of(csi.values[i]) * z;
  }
  return in;
}

RealVector prediction_target(const ComplexVector& truth) {
  const Eigen::Index n = truth.size();
  RealVector t(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t[i] = std::abs(truth[i]);
    t[n + i] = phase_of(truth[i]) / kPi;
  }
  return t;
}

void overwrite_measured(FullSurfacePrediction& pred, const EstimatedCsi& csi,
                        const ActiveSet& set) {
  if (csi.values.size() != set.size())
    throw ContractError("estimated CSI and active set lengths differ");
  if (pred.size() != set.grid().size())
    throw ContractError("prediction length does not match the grid");
  for (int i = 0; i < set.size(); ++i) {
    const int k = flat_offset(set.grid(), set[i]);
    pred.magnitudes[k] = std::abs(csi.values[i]);
    pred.phases[k] = phase_of(csi.values[i]);
  }
}

FullSurfacePrediction decode_outputs(const RealVector& outputs) {
  if (outputs.size() % 2 != 0)
    throw ContractError("network output length must be even");
  const Eigen::Index n = outputs.size() / 2;
  FullSurfacePrediction p;
  p.magnitudes = outputs.head(n).cwiseMax(0.0);
  p.phases.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.phases[i] = wrap_phase(kPi * outputs[n + i]);
  return p;
}

}  // namespace soris
