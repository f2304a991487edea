#pragma once

#include <cstdint>
#include <vector>

#include "soris/geometry.hpp"
#include "soris/random.hpp"

namespace soris {

struct RicianConfig {
  double kappa_db = 8.0;
  double los_azimuth = 0.0;    // radians, 0 = broadside
  double los_elevation = 0.0;  // radians

  double kappa_linear() const;
};

// Per-element scalar channels of one coherence block. The uplink vector is
// the UE->RIS channel and, by reciprocity, also the RIS->UE channel.
struct ChannelRealization {
  ComplexVector downlink;
  ComplexVector uplink;
};

// Unit-modulus plane-wave steering vector over the grid.
ComplexVector los_component(const GridSpec& grid, const RicianConfig& config);

// One vector sqrt(k/(k+1)) los + sqrt(1/(k+1)) L w.
ComplexVector sample_link(RandomStream& rng, const CorrelationModel& corr,
                          const ComplexVector& los, double kappa);

// Downlink then uplink, each with independent scattering.
ChannelRealization sample_channel(RandomStream& rng,
                                  const CorrelationModel& corr,
                                  const GridSpec& grid,
                                  const RicianConfig& config);

// Label of the substream that generates dataset sample `index`.
std::string sample_label(std::size_t index);

// `count` realizations; sample i is drawn from substream "sample:i" of
// `seed` so it does not depend on which other samples are generated.
std::vector<ChannelRealization> channel_dataset(
    std::uint64_t seed, const CorrelationModel& corr, const GridSpec& grid,
    const RicianConfig& config, std::size_t count,
    Execution exec = Execution::parallel);

}  // namespace soris
