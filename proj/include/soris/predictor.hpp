#pragma once

#include <string>

#include "soris/estimation.hpp"

namespace soris {

// Space-stamped sequence fed to the recurrent predictor. Column i of
// `sequence` holds (|h_i| z_i, theta_i z_i) for the i-th active element.
struct AugmentedInput {
  RealMatrix sequence;  // 2 x S
  RealVector stamps;    // S, z_i = flat(element_i) / N

  int steps() const noexcept { return static_cast<int>(sequence.cols()); }
};

// Full-surface channel estimate in polar form, flat element order.
struct FullSurfacePrediction {
  RealVector magnitudes;
  RealVector phases;  // (-pi, pi]

  int size() const noexcept { return static_cast<int>(magnitudes.size()); }
  ComplexVector complex_view() const;

  static FullSurfacePrediction from_complex(const ComplexVector& h);
};

AugmentedInput preprocess(const EstimatedCsi& csi, const ActiveSet& set);

// Training target: N magnitudes followed by N phases divided by pi.
RealVector prediction_target(const ComplexVector& truth);

// Replaces entries at active positions with the measured estimates.
void overwrite_measured(FullSurfacePrediction& pred, const EstimatedCsi& csi,
                        const ActiveSet& set);

// Maps network outputs (N magnitudes, N phases/pi) to a prediction.
// Magnitudes are clamped at zero and phases wrapped.
FullSurfacePrediction decode_outputs(const RealVector& outputs);

// Common interface used by the evaluation loops. `truth` is only read by the
// perfect-CSI reference.
class ChannelPredictor {
public:
  virtual ~ChannelPredictor() = default;
  virtual std::string name() const = 0;
  virtual FullSurfacePrediction predict(const EstimatedCsi& csi,
                                        const ActiveSet& set,
                                        const ComplexVector& truth) const = 0;
};

// Perfect channel knowledge.
class IdealPredictor final : public ChannelPredictor {
public:
  std::string name() const override { return "ideal"; }
  FullSurfacePrediction predict(const EstimatedCsi&, const ActiveSet&,
                                const ComplexVector& truth) const override {
    return FullSurfacePrediction::from_complex(truth);
  }
};

}  // namespace soris
