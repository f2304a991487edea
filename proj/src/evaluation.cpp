#include "soris/evaluation.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "soris/error.hpp"

namespace soris {

namespace {

void check_lengths(const ComplexVector& truth, const FullSurfacePrediction& pred) {
  if (truth.size() != pred.magnitudes.size() || truth.size() != pred.phases.size())
    throw ContractError("prediction covers " + std::to_string(pred.magnitudes.size()) +
                        " elements, truth has " + std::to_string(truth.size()));
  if (truth.size() == 0) throw ContractError("empty channel vector");
}

struct Moments {
  double mean = 0.0;
  double std_err = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const auto n = v.size();
  m.mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
  if (n < 2) return m;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
  const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  m.std_err = std::sqrt(var / static_cast<double>(n));
  return m;
}

AmseReport make_report(const std::vector<double>& eh, const std::vector<double>& et,
                       const std::vector<double>& etw) {
  AmseReport r;
  r.trials = static_cast<int>(eh.size());
  const Moments mh = moments(eh), mt = moments(et), mw = moments(etw);
  r.e_h_mean = mh.mean;
  r.e_theta_mean = mt.mean;
  r.e_theta_wrapped_mean = mw.mean;
  r.std_err_h = mh.std_err;
  r.std_err_theta = mt.std_err;
  r.std_err_defined = r.trials > 1;
  return r;
}

// Runs body(i) for i in [0, n), serially or across OpenMP threads, and
// rethrows the first exception raised by any iteration.
template <class Body>
void for_trials(int n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(soris_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

double mse_magnitude(const ComplexVector& truth, const FullSurfacePrediction& pred) {
  check_lengths(truth, pred);
  double s = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const double d = std::abs(truth[i]) - pred.magnitudes[i];
    s += d * d;
  }
  return s / static_cast<double>(truth.size());
}

double mse_phase(const ComplexVector& truth, const FullSurfacePrediction& pred) {
  check_lengths(truth, pred);
  double s = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const double d = std::abs(phase_of(truth[i])) - std::abs(pred.phases[i]);
    s += d * d;
  }
  return s / static_cast<double>(truth.size());
}

double mse_phase_wrapped(const ComplexVector& truth, const FullSurfacePrediction& pred) {
  check_lengths(truth, pred);
  double s = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const double d = wrap_phase(phase_of(truth[i]) - pred.phases[i]);
    s += d * d;
  }
  return s / static_cast<double>(truth.size());
}

TrialEstimates draw_trial(const RandomStream& trial, const Scenario& scenario,
                          const CorrelationModel& corr) {
  TrialEstimates t;
  RandomStream channel_rng = trial.substream("channel");
  t.channel = sample_channel(channel_rng, corr, scenario.grid, scenario.rician);
  auto [down, up] =
      estimate_active_set(trial.substream("pilots"), t.channel, scenario.set, scenario.pilots);
  RandomStream err_down = trial.substream("error:down");
  RandomStream err_up = trial.substream("error:up");
  down.values = inject_estimator_error(err_down, down.values, scenario.sigma);
  up.values = inject_estimator_error(err_up, up.values, scenario.sigma);
  t.downlink = std::move(down);
  t.uplink = std::move(up);
  return t;
}

AmseResult amse_monte_carlo(std::uint64_t seed, const Scenario& scenario,
                            const CorrelationModel& corr,
                            const ChannelPredictor& predictor, int trials,
                            Execution exec) {
  if (trials < 1) throw ConfigError("AMSE needs at least one trial");
  if (!(scenario.set.grid() == scenario.grid))
    throw ConfigError("active set belongs to a different grid");
  scenario.pilots.validate();
  if (scenario.sigma < 0.0) throw ConfigError("estimator error sigma must be >= 0");

  const auto n = static_cast<std::size_t>(trials);
  std::vector<double> dh(n), dt(n), dw(n), uh(n), ut(n), uw(n);
  const RandomStream root(seed);
  for_trials(trials, exec, [&](int i) {
    const TrialEstimates t = draw_trial(root.substream("trial:" + std::to_string(i)),
                                        scenario, corr);
    const FullSurfacePrediction pd =
        predictor.predict(t.downlink, scenario.set, t.channel.downlink);
    const FullSurfacePrediction pu =
        predictor.predict(t.uplink, scenario.set, t.channel.uplink);
    dh[i] = mse_magnitude(t.channel.downlink, pd);
    dt[i] = mse_phase(t.channel.downlink, pd);
    dw[i] = mse_phase_wrapped(t.channel.downlink, pd);
    uh[i] = mse_magnitude(t.channel.uplink, pu);
    ut[i] = mse_phase(t.channel.uplink, pu);
    uw[i] = mse_phase_wrapped(t.channel.uplink, pu);
  });

  std::vector<double> ch(n), ct(n), cw(n);
  for (std::size_t i = 0; i < n; ++i) {
    ch[i] = 0.5 * (dh[i] + uh[i]);
    ct[i] = 0.5 * (dt[i] + ut[i]);
    cw[i] = 0.5 * (dw[i] + uw[i]);
  }
  return {make_report(dh, dt, dw), make_report(uh, ut, uw), make_report(ch, ct, cw)};
}

ComplexVector configure_phases(const FullSurfacePrediction& down,
                               const FullSurfacePrediction& up) {
  if (down.phases.size() != up.phases.size())
    throw ContractError("downlink and uplink predictions differ in length");
  ComplexVector r(down.phases.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    r[i] = std::polar(1.0, -(down.phases[i] + up.phases[i]));
  return r;
}

cdouble effective_gain(const ChannelRealization& channel, const ComplexVector& responses) {
  if (channel.downlink.size() != responses.size() || channel.uplink.size() != responses.size())
    throw ContractError("response vector length does not match the channel");
  cdouble g{0.0, 0.0};
  for (Eigen::Index i = 0; i < responses.size(); ++i)
    g += channel.downlink[i] * responses[i] * channel.uplink[i];
  return g;
}

BerResult ber_simulation(std::uint64_t seed, const Scenario& scenario,
                         const CorrelationModel& corr,
                         const ChannelPredictor& predictor, double snr_db,
                         std::int64_t bits, int bits_per_block, Execution exec) {
  if (bits < 1000) throw ConfigError("BER estimation needs at least 1000 bits");
  if (bits_per_block < 1) throw ConfigError("bits per block must be positive");
  if (!(scenario.set.grid() == scenario.grid))
    throw ConfigError("active set belongs to a different grid");

  const auto blocks = static_cast<int>((bits + bits_per_block - 1) / bits_per_block);
  const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
  std::vector<std::int64_t> errors(blocks, 0), sent(blocks, 0);
  const RandomStream root(seed);

  for_trials(blocks, exec, [&](int b) {
    const RandomStream block = root.substream("block:" + std::to_string(b));
    const TrialEstimates t = draw_trial(block, scenario, corr);
    const FullSurfacePrediction pd =
        predictor.predict(t.downlink, scenario.set, t.channel.downlink);
    const FullSurfacePrediction pu =
        predictor.predict(t.uplink, scenario.set, t.channel.uplink);
    const cdouble gain = effective_gain(t.channel, configure_phases(pd, pu));

    RandomStream data = block.substream("data");
    const std::int64_t first = static_cast<std::int64_t>(b) * bits_per_block;
    const std::int64_t count = std::min<std::int64_t>(bits_per_block, bits - first);
    std::int64_t errs = 0;
    for (std::int64_t k = 0; k < count; ++k) {
      const double s = data.uniform() < 0.5 ? -1.0 : 1.0;
      const cdouble y = amp * gain * s + data.complex_normal();
      const double metric = (std::conj(gain) * y).real();
      const double decided = metric < 0.0 ? -1.0 : 1.0;
      errs += decided != s;
    }
    errors[b] = errs;
    sent[b] = count;
  });

  BerResult r;
  r.blocks = blocks;
  std::vector<double> rates(blocks);
  for (int b = 0; b < blocks; ++b) {
    r.errors += errors[b];
    r.bits += sent[b];
    rates[b] = static_cast<double>(errors[b]) / static_cast<double>(sent[b]);
  }
  r.ber = static_cast<double>(r.errors) / static_cast<double>(r.bits);
  r.std_err = moments(rates).std_err;
  r.ci_low = std::max(0.0, r.ber - 1.96 * r.std_err);
  r.ci_high = std::min(1.0, r.ber + 1.96 * r.std_err);
  return r;
}

}  // namespace soris
