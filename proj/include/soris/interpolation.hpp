#pragma once

#include "soris/predictor.hpp"

namespace soris {

// Inverse-distance-weighted (power 2) interpolation of the real and
// imaginary parts of the measured estimates; measured elements pass through.
FullSurfacePrediction li_baseline(const EstimatedCsi& csi, const ActiveSet& set);

class InterpolationPredictor final : public ChannelPredictor {
public:
  std::string name() const override { return "li"; }
  FullSurfacePrediction predict(const EstimatedCsi& csi, const ActiveSet& set,
                                const ComplexVector&) const override {
    return li_baseline(csi, set);
  }
};

}  // namespace soris
