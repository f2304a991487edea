#pragma once

#include <cstdint>
#include <vector>

#include "soris/channel.hpp"
#include "soris/estimation.hpp"
#include "soris/predictor.hpp"

namespace soris {

// (1/N) sum (|h_n| - |h^_n|)^2
double mse_magnitude(const ComplexVector& truth, const FullSurfacePrediction& pred);

// (1/N) sum (|theta_n| - |theta^_n|)^2, the absolute-phase form.
double mse_phase(const ComplexVector& truth, const FullSurfacePrediction& pred);

// (1/N) sum wrap(theta_n - theta^_n)^2, reported next to mse_phase.
double mse_phase_wrapped(const ComplexVector& truth, const FullSurfacePrediction& pred);

struct AmseReport {
  double e_h_mean = 0.0;
  double e_theta_mean = 0.0;
  double e_theta_wrapped_mean = 0.0;
  int trials = 0;
  double std_err_h = 0.0;
  double std_err_theta = 0.0;
  // False for a single trial, where the standard errors are reported as 0.
  bool std_err_defined = false;
};

struct AmseResult {
  AmseReport downlink;
  AmseReport uplink;
  // Per-trial average of the two links.
  AmseReport combined;
};

// One evaluation setting: channel statistics, selection, pilots and the
// standard deviation of the injected estimator error.
struct Scenario {
  GridSpec grid;
  RicianConfig rician;
  ActiveSet set;
  PilotConfig pilots;
  double sigma = 0.0;
};

// Per trial: fresh channel, pilot estimation, optional error injection and a
// prediction for each link. Trial i uses substream "trial:i" of `seed`, so
// serial and parallel runs give identical reports.
AmseResult amse_monte_carlo(std::uint64_t seed, const Scenario& scenario,
                            const CorrelationModel& corr,
                            const ChannelPredictor& predictor, int trials,
                            Execution exec = Execution::parallel);

// Estimated CSI of one trial, as seen by the predictor.
struct TrialEstimates {
  ChannelRealization channel;
  EstimatedCsi downlink;
  EstimatedCsi uplink;
};
TrialEstimates draw_trial(const RandomStream& trial, const Scenario& scenario,
                          const CorrelationModel& corr);

// Unit-modulus responses exp(-j (theta_n + theta_u,n)) that phase-align
// every cascade term h_n R_n h_u,n.
ComplexVector configure_phases(const FullSurfacePrediction& down,
                               const FullSurfacePrediction& up);

// sum_n h_n R_n h_u,n
cdouble effective_gain(const ChannelRealization& channel, const ComplexVector& responses);

struct BerResult {
  double ber = 0.0;
  double std_err = 0.0;
  double ci_low = 0.0;   // 95% normal interval, clipped to [0, 1]
  double ci_high = 0.0;
  std::int64_t bits = 0;
  std::int64_t errors = 0;
  int blocks = 0;
};

// BPSK over the RIS-assisted link: y = sqrt(snr) G s + n with n ~ CN(0, 1)
// and coherent detection. Each block of `bits_per_block` bits sees a fresh
// channel; the standard error is taken across blocks.
BerResult ber_simulation(std::uint64_t seed, const Scenario& scenario,
                         const CorrelationModel& corr,
                         const ChannelPredictor& predictor, double snr_db,
                         std::int64_t bits, int bits_per_block = 100,
                         Execution exec = Execution::parallel);

// Pairwise summation; result depends only on the order of `values`.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace soris
