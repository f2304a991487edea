#include "soris/channel.hpp"

#include <cmath>
#include <string>

#include "soris/error.hpp"

namespace soris {

double RicianConfig::kappa_linear() const {
  return std::pow(10.0, kappa_db / 10.0);
}

ComplexVector los_component(const GridSpec& grid, const RicianConfig& config) {
  const int n = grid.size();
  const double k = 2.0 * kPi / grid.wavelength;
  const double ux = std::sin(config.los_azimuth) * std::cos(config.los_elevation);
  const double uy = std::sin(config.los_elevation);
  ComplexVector los(n);
  for (int i = 0; i < n; ++i) {
    const Point2 p = element_position(grid, element_at(grid, i + 1));
    los[i] = std::polar(1.0, k * (p.x * ux + p.y * uy));
  }
  return los;
}

ComplexVector sample_link(RandomStream& rng, const CorrelationModel& corr,
                          const ComplexVector& los, double kappa) {
  const double los_weight = std::sqrt(kappa / (kappa + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (kappa + 1.0));
  const ComplexVector w = rng.complex_normal_vector(corr.size());
  const RealVector re = corr.sqrt_factor * w.real();
  const RealVector im = corr.sqrt_factor * w.imag();
  ComplexVector h(los.size());
  for (Eigen::Index i = 0; i < h.size(); ++i)
    h[i] = los_weight * los[i] + nlos_weight * cdouble(re[i], im[i]);
  return h;
}

ChannelRealization sample_channel(RandomStream& rng,
                                  const CorrelationModel& corr,
                                  const GridSpec& grid,
                                  const RicianConfig& config) {
  if (corr.size() != grid.size() || !(corr.grid == grid))
    throw ConfigError("correlation model built for a " +
                      std::to_string(corr.grid.rows) + "x" +
                      std::to_string(corr.grid.cols) +
                      " grid does not match the requested " +
                      std::to_string(grid.rows) + "x" +
                      std::to_string(grid.cols) + " grid");
  const double kappa = config.kappa_linear();
  const ComplexVector los = los_component(grid, config);
  ChannelRealization ch;
  ch.downlink = sample_link(rng, corr, los, kappa);
  ch.uplink = sample_link(rng, corr, los, kappa);
  return ch;
}

std::string sample_label(std::size_t index) {
  return "sample:" + std::to_string(index);
}

std::vector<ChannelRealization> channel_dataset(
    std::uint64_t seed, const CorrelationModel& corr, const GridSpec& grid,
    const RicianConfig& config, std::size_t count, Execution exec) {
  if (count < 1) throw ConfigError("dataset needs at least one sample");
  const RandomStream root(seed);
  std::vector<ChannelRealization> out(count);
  auto draw = [&](std::size_t i) {
    RandomStream rng = root.substream(sample_label(i));
    out[i] = sample_channel(rng, corr, grid, config);
  };
  if (exec == Execution::parallel) {
    // Exceptions cannot cross the OpenMP region; validate up front.
    if (corr.size() != grid.size() || !(corr.grid == grid))
      throw ConfigError("correlation model does not match grid");
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < count; ++i) draw(i);
  } else {
    for (std::size_t i = 0; i < count; ++i) draw(i);
  }
  return out;
}

}  // namespace soris
