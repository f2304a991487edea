#pragma once

#include <utility>
#include <vector>

#include "soris/channel.hpp"
#include "soris/selection.hpp"

namespace soris {

enum class PilotPattern { constant, alternating };

struct PilotConfig {
  int pilots_down = 10;          // L
  int pilots_up = 10;            // L_u
  double pilot_power = 1.0;      // energy per pilot symbol
  double noise_variance = 1e-4;  // sigma_n^2 at the controller receiver
  double symbol_period = 1e-6;   // seconds
  PilotPattern pattern = PilotPattern::constant;

  void validate() const;
};

// Pilot symbols of energy `power`: all +sqrt(P), or alternating +-sqrt(P).
ComplexVector pilot_sequence(int length, double power,
                             PilotPattern pattern = PilotPattern::constant);

// Known element response R_s and element-to-controller gain g_s.
struct ElementLink {
  cdouble response{1.0, 0.0};
  cdouble controller_gain{1.0, 0.0};

  cdouble product() const { return response * controller_gain; }
  void validate() const;
};

enum class LinkDirection { downlink, uplink };

// Recovered per-element channels in ActiveSet order.
struct EstimatedCsi {
  ComplexVector values;
  LinkDirection link = LinkDirection::downlink;
};

// r(l) = h R g x(l) + n(l), n ~ CN(0, noise_var).
ComplexVector simulate_received(RandomStream& rng, cdouble channel,
                                const ElementLink& link,
                                const ComplexVector& pilots, double noise_var);

// Least-squares cascade estimate sum(conj(x) r) / sum(|x|^2).
cdouble ls_estimate_cascade(const ComplexVector& received,
                            const ComplexVector& pilots);

cdouble recover_element_channel(cdouble cascade, const ElementLink& link);

// Runs the downlink then uplink pilot sub-phases over the active set.
// `down_links` and `up_links` are indexed by flat offset (size N). Element s
// draws its noise from substreams "down:<flat>" and "up:<flat>" of `rng`.
std::pair<EstimatedCsi, EstimatedCsi> estimate_active_set(
    const RandomStream& rng, const ChannelRealization& channel,
    const ActiveSet& set, const std::vector<ElementLink>& down_links,
    const std::vector<ElementLink>& up_links, const PilotConfig& config);

// Same, with unit responses and gains on every element.
std::pair<EstimatedCsi, EstimatedCsi> estimate_active_set(
    const RandomStream& rng, const ChannelRealization& channel,
    const ActiveSet& set, const PilotConfig& config);

// Adds independent CN(0, sigma^2) errors to every entry.
ComplexVector inject_estimator_error(RandomStream& rng,
                                     const ComplexVector& values, double sigma);

// CSI acquisition latency D = 2 N_f L T_s.
double csi_latency(int n_f, int pilots, double symbol_period);

}  // namespace soris
