#include "soris/estimation.hpp"

#include <cmath>
#include <string>

#include "soris/error.hpp"

namespace soris {

void PilotConfig::validate() const {
  if (pilots_down < 1 || pilots_up < 1)
    throw ConfigError("pilot counts L and L_u must be at least 1");
  if (!(pilot_power > 0.0)) throw ConfigError("pilot power must be positive");
  if (!(noise_variance >= 0.0))
    throw ConfigError("noise variance must be non-negative");
  if (!(symbol_period > 0.0))
    throw ConfigError("symbol period must be positive");
}

ComplexVector pilot_sequence(int length, double power, PilotPattern pattern) {
  if (length < 1) throw ConfigError("pilot sequence needs at least one symbol");
  const double amp = std::sqrt(power);
  ComplexVector x(length);
  for (int l = 0; l < length; ++l) {
    const double sign =
        (pattern == PilotPattern::alternating && (l % 2 == 1)) ? -1.0 : 1.0;
    x[l] = {sign * amp, 0.0};
  }
  return x;
}

void ElementLink::validate() const {
  if (std::abs(response) == 0.0 || std::abs(controller_gain) == 0.0)
    throw ConfigError(
        "element response and controller gain must be nonzero to recover the "
        "element channel");
}

ComplexVector simulate_received(RandomStream& rng, cdouble channel,
                                const ElementLink& link,
                                const ComplexVector& pilots, double noise_var) {
  if (pilots.size() == 0) throw ContractError("pilot vector is empty");
  if (noise_var < 0.0) throw ContractError("noise variance is negative");
  const cdouble cascade = channel * link.product();
  const double noise_std = std::sqrt(noise_var);
  ComplexVector r(pilots.size());
  for (Eigen::Index l = 0; l < pilots.size(); ++l) {
    r[l] = cascade * pilots[l];
    if (noise_std > 0.0) r[l] += noise_std * rng.complex_normal();
  }
  return r;
}

cdouble ls_estimate_cascade(const ComplexVector& received,
                            const ComplexVector& pilots) {
  if (received.size() != pilots.size())
    throw ContractError("received and pilot lengths differ");
  const double energy = pilots.squaredNorm();
  if (!(energy > 0.0))
    throw DegeneratePilotError("pilot sequence has zero energy");
  return pilots.dot(received) / energy;  // dot() conjugates the left side
}

cdouble recover_element_channel(cdouble cascade, const ElementLink& link) {
  link.validate();
  return cascade / link.product();
}

namespace {

EstimatedCsi run_subphase(const RandomStream& rng, const ComplexVector& truth,
                          const ActiveSet& set,
                          const std::vector<ElementLink>& links,
                          const ComplexVector& pilots, double noise_var,
                          LinkDirection dir, const char* prefix) {
  EstimatedCsi csi;
  csi.link = dir;
  csi.values.resize(set.size());
  const GridSpec& grid = set.grid();
  for (int i = 0; i < set.size(); ++i) {
    const int flat = flat_index(grid, set[i]);
    const ElementLink& link = links[flat - 1];
    RandomStream noise = rng.substream(prefix + std::to_string(flat));
    const ComplexVector r =
        simulate_received(noise, truth[flat - 1], link, pilots, noise_var);
    csi.values[i] = recover_element_channel(ls_estimate_cascade(r, pilots), link);
  }
  return csi;
}

}  // namespace

std::pair<EstimatedCsi, EstimatedCsi> estimate_active_set(
    const RandomStream& rng, const ChannelRealization& channel,
    const ActiveSet& set, const std::vector<ElementLink>& down_links,
    const std::vector<ElementLink>& up_links, const PilotConfig& config) {
  config.validate();
  const int n = set.grid().size();
  if (set.size() < 1) throw ContractError("active set is empty");
  if (channel.downlink.size() != n || channel.uplink.size() != n)
    throw ContractError("channel length does not match the active set grid");
  if (static_cast<int>(down_links.size()) != n ||
      static_cast<int>(up_links.size()) != n)
    throw ContractError("element link tables must hold one entry per element");

  const ComplexVector x_down =
      pilot_sequence(config.pilots_down, config.pilot_power, config.pattern);
  const ComplexVector x_up =
      pilot_sequence(config.pilots_up, config.pilot_power, config.pattern);
  return {run_subphase(rng, channel.downlink, set, down_links, x_down,
                       config.noise_variance, LinkDirection::downlink, "down:"),
          run_subphase(rng, channel.uplink, set, up_links, x_up,
                       config.noise_variance, LinkDirection::uplink, "up:")};
}

std::pair<EstimatedCsi, EstimatedCsi> estimate_active_set(
    const RandomStream& rng, const ChannelRealization& channel,
    const ActiveSet& set, const PilotConfig& config) {
  const std::vector<ElementLink> unit(set.grid().size());
  return estimate_active_set(rng, channel, set, unit, unit, config);
}

ComplexVector inject_estimator_error(RandomStream& rng,
                                     const ComplexVector& values, double sigma) {
  if (sigma < 0.0) throw ContractError("estimator error sigma is negative");
  ComplexVector out = values;
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] += sigma * rng.complex_normal();
  return out;
}

double csi_latency(int n_f, int pilots, double symbol_period) {
  if (n_f < 1 || pilots < 1 || !(symbol_period > 0.0))
    throw ConfigError("latency inputs must be positive");
  return 2.0 * n_f * pilots * symbol_period;
}

}  // namespace soris
