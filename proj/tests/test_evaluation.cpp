#include <cmath>

#include "doctest.h"
#include "soris/error.hpp"
#include "soris/evaluation.hpp"
#include "soris/interpolation.hpp"

using namespace soris;

namespace {

FullSurfacePrediction polar(std::vector<double> mag, std::vector<double> ph) {
  FullSurfacePrediction p;
  p.magnitudes = Eigen::Map<RealVector>(mag.data(), mag.size());
  p.phases = Eigen::Map<RealVector>(ph.data(), ph.size());
  return p;
}

Scenario scenario(int rows, int cols, double frac, std::vector<ElementIndex> set) {
  Scenario s;
  s.grid = GridSpec::from_fraction(rows, cols, frac);
  s.set = ActiveSet(s.grid, std::move(set));
  return s;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("magnitude error") {
  ComplexVector h(2);
  h << cdouble(1, 0), cdouble(0, 1);
  CHECK(mse_magnitude(h, FullSurfacePrediction::from_complex(h)) == 0.0);
  CHECK(mse_magnitude(h, polar({0.9, 1.1}, {0, 0})) == doctest::Approx(0.01).epsilon(1e-12));
  const double e1 = mse_magnitude(h, polar({0.8, 1.3}, {0, 0}));
  const double e2 = mse_magnitude(h, polar({0.6, 1.6}, {0, 0}));
  CHECK(e2 == doctest::Approx(4 * e1).epsilon(1e-12));
  CHECK_THROWS_AS(mse_magnitude(h, polar({1}, {0})), ContractError);
}

TEST_CASE("phase error in literal and wrapped form") {
  ComplexVector h(1);
  h << std::polar(1.0, kPi / 2);
  CHECK(mse_phase(h, FullSurfacePrediction::from_complex(h)) == 0.0);
  const FullSurfacePrediction flipped = polar({1}, {-kPi / 2});
  CHECK(mse_phase(h, flipped) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mse_phase_wrapped(h, flipped) == doctest::Approx(kPi * kPi).epsilon(1e-12));

  ComplexVector h2(2);
  h2 << std::polar(1.0, 0.1), std::polar(1.0, -0.2);
  CHECK(mse_phase(h2, polar({1, 1}, {0.2, -0.1})) == doctest::Approx(0.01).epsilon(1e-10));
  CHECK_THROWS_AS(mse_phase(h2, polar({1}, {0})), ContractError);
}

TEST_CASE("Monte Carlo AMSE") {
  const Scenario s = scenario(4, 4, 0.25, {{1, 1}, {4, 4}});
  const CorrelationModel corr = correlation_matrix(s.grid);
  const IdealPredictor ideal;
  const AmseResult r = amse_monte_carlo(3, s, corr, ideal, 20);
  CHECK(r.downlink.e_h_mean == 0.0);
  CHECK(r.uplink.e_theta_mean == 0.0);
  CHECK(r.combined.trials == 20);
  CHECK(r.combined.std_err_defined);

  const AmseResult one = amse_monte_carlo(3, s, corr, InterpolationPredictor{}, 1);
  CHECK_FALSE(one.combined.std_err_defined);
  CHECK(one.combined.std_err_h == 0.0);

  CHECK_THROWS_AS(amse_monte_carlo(3, s, corr, ideal, 0), ConfigError);
}

TEST_CASE("interpolation is exact on a pure line-of-sight surface") {
  Scenario s = scenario(8, 8, 0.125, {{1, 1}, {8, 8}, {4, 5}});
  s.rician.kappa_db = 300.0;
  s.pilots.noise_variance = 0.0;
  const CorrelationModel corr = correlation_matrix(s.grid);
  const AmseResult r = amse_monte_carlo(4, s, corr, InterpolationPredictor{}, 50);
  CHECK(r.combined.e_h_mean <= 1e-20);
}

TEST_CASE("standard error shrinks with the square root of the trial count") {
  const Scenario s = scenario(8, 8, 0.125, {{1, 1}, {1, 8}, {8, 1}, {8, 8}});
  const CorrelationModel corr = correlation_matrix(s.grid);
  const InterpolationPredictor li;
  // single SE estimates are noisy at 100 trials, so average over seeds
  double se100 = 0, se400 = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    se100 += amse_monte_carlo(seed, s, corr, li, 100).combined.std_err_h;
    se400 += amse_monte_carlo(seed + 1000, s, corr, li, 400).combined.std_err_h;
  }
  const double ratio = se400 / se100;
  CHECK(ratio >= 0.45);
  CHECK(ratio <= 0.55);
}

TEST_CASE("serial and parallel trials agree bit for bit") {
  Scenario s = scenario(8, 8, 0.125, {{1, 1}, {1, 8}, {8, 1}, {8, 8}});
  s.sigma = 0.05;
  const CorrelationModel corr = correlation_matrix(s.grid);
  const InterpolationPredictor li;
  const AmseResult a = amse_monte_carlo(6, s, corr, li, 64, Execution::serial);
  const AmseResult b = amse_monte_carlo(6, s, corr, li, 64, Execution::parallel);
  CHECK(a.combined.e_h_mean == b.combined.e_h_mean);
  CHECK(a.downlink.e_theta_mean == b.downlink.e_theta_mean);
  CHECK(a.uplink.std_err_h == b.uplink.std_err_h);

  const BerResult x = ber_simulation(6, s, corr, li, -30.0, 5000, 100, Execution::serial);
  const BerResult y = ber_simulation(6, s, corr, li, -30.0, 5000, 100, Execution::parallel);
  CHECK(x.errors == y.errors);
  CHECK(x.std_err == y.std_err);
}

TEST_CASE("phase configuration") {
  RandomStream rng(7);
  ChannelRealization ch{rng.complex_normal_vector(16), rng.complex_normal_vector(16)};
  const auto d = FullSurfacePrediction::from_complex(ch.downlink);
  const auto u = FullSurfacePrediction::from_complex(ch.uplink);
  const ComplexVector r = configure_phases(d, u);
  for (Eigen::Index i = 0; i < r.size(); ++i) CHECK(std::abs(std::abs(r[i]) - 1.0) < 1e-15);
  const cdouble g = effective_gain(ch, r);
  const double ideal = (ch.downlink.cwiseAbs().array() * ch.uplink.cwiseAbs().array()).sum();
  CHECK(std::abs(g.imag()) < 1e-12);
  CHECK(g.real() == doctest::Approx(ideal).epsilon(1e-12));

  FullSurfacePrediction flat = d;
  flat.phases.setZero();
  const ComplexVector ones = configure_phases(flat, flat);
  for (Eigen::Index i = 0; i < ones.size(); ++i) CHECK(ones[i] == cdouble(1.0, -0.0));

  for (int t = 0; t < 1000; ++t) {
    ComplexVector rnd(16);
    for (auto& z : rnd) z = std::polar(1.0, 2 * kPi * rng.uniform());
    CHECK(std::abs(effective_gain(ch, rnd)) <= std::abs(g) + 1e-12);
  }
}

TEST_CASE("bit error rate") {
  const CorrelationModel c1 = correlation_matrix(GridSpec::from_fraction(1, 1, 0.5));
  Scenario single = scenario(1, 1, 0.5, {{1, 1}});
  const IdealPredictor ideal;

  CHECK_THROWS_AS(ber_simulation(1, single, c1, ideal, 0.0, 999), ConfigError);
  CHECK(ber_simulation(1, single, c1, ideal, 300.0, 10000).ber == 0.0);

  // Q-function average over independent draws of the single-element cascade
  const double snr_db = 1.5, snr = std::pow(10.0, snr_db / 10.0);
  RandomStream orng(99);
  const int draws = 10000;
  double q = 0, q2 = 0;
  for (int i = 0; i < draws; ++i) {
    const ChannelRealization ch = sample_channel(orng, c1, single.grid, {});
    const double g2 = std::norm(ch.downlink[0]) * std::norm(ch.uplink[0]);
    const double p = q_function(std::sqrt(2 * snr * g2));
    q += p;
    q2 += p * p;
  }
  const double oracle = q / draws;
  const double oracle_se = std::sqrt((q2 / draws - oracle * oracle) / draws);
  const BerResult sim = ber_simulation(2, single, c1, ideal, snr_db, 100000, 10);
  CHECK(sim.blocks == 10000);
  CAPTURE(sim.ber);
  CAPTURE(oracle);
  CHECK(std::abs(sim.ber - oracle) < 3 * std::hypot(sim.std_err, oracle_se));
  CHECK(sim.ci_low <= sim.ber);
  CHECK(sim.ci_high >= sim.ber);

  Scenario s = scenario(8, 8, 0.125, {{1, 1}, {1, 8}, {8, 1}, {8, 8}});
  const CorrelationModel c8 = correlation_matrix(s.grid);
  const InterpolationPredictor li;
  double prev = 1.0, prev_se = 0.0;
  for (double snr_point : {-42.0, -39.0, -36.0}) {
    const BerResult bi = ber_simulation(3, s, c8, ideal, snr_point, 20000);
    const BerResult bp = ber_simulation(3, s, c8, li, snr_point, 20000);
    CHECK(bi.ber <= bp.ber + 3 * std::hypot(bi.std_err, bp.std_err));
    CHECK(bp.ber <= prev + 3 * std::hypot(bp.std_err, prev_se));
    prev = bp.ber;
    prev_se = bp.std_err;
  }
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
}
