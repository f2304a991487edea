#include <cmath>

#include "doctest.h"
#include "soris/channel.hpp"
#include "soris/error.hpp"

using namespace soris;

TEST_CASE("split_seed is a pure function of parent and label") {
  CHECK(split_seed(7, "train") == split_seed(7, "train"));
  CHECK(split_seed(7, "train") != split_seed(7, "eval"));
  CHECK(split_seed(7, "train") != split_seed(8, "train"));
  RandomStream a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  RandomStream parent(3);
  const RandomStream child1 = parent.substream("x");
  parent.uniform();
  const RandomStream child2 = parent.substream("x");
  CHECK(child1.seed() == child2.seed());
}

TEST_CASE("random stream moments") {
  RandomStream rng(11);
  const int n = 200000;
  double s = 0, s2 = 0, p = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
    p += std::norm(rng.complex_normal());
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
  CHECK(std::abs(p / n - 1.0) < 0.015);
  for (int i = 0; i < 1000; ++i) {
    const auto k = rng.below(7);
    CHECK(k < 7);
    const double u = rng.uniform_open_low();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("line-of-sight component") {
  const GridSpec g = GridSpec::from_fraction(4, 5, 0.3);
  const ComplexVector broadside = los_component(g, {});
  for (Eigen::Index i = 0; i < broadside.size(); ++i) CHECK(broadside[i] == cdouble(1.0, 0.0));

  RicianConfig tilted;
  tilted.los_azimuth = M_PI / 2;
  const ComplexVector pair = los_component(GridSpec::from_fraction(1, 2, 0.5), tilted);
  CHECK(std::abs(pair[0] - cdouble(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(pair[1] - cdouble(-1.0, 0.0)) < 1e-12);

  RandomStream rng(5);
  for (int t = 0; t < 20; ++t) {
    RicianConfig c;
    c.los_azimuth = 2 * M_PI * rng.uniform();
    c.los_elevation = M_PI * (rng.uniform() - 0.5);
    const ComplexVector v = los_component(g, c);
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::abs(std::abs(v[i]) - 1.0) < 1e-14);
  }
}

TEST_CASE("very large Rician factor leaves only the line of sight") {
  const GridSpec g = GridSpec::from_fraction(8, 8, 0.125);
  const CorrelationModel corr = correlation_matrix(g);
  RicianConfig c;
  c.kappa_db = 300.0;
  RandomStream rng(1);
  const ChannelRealization ch = sample_channel(rng, corr, g, c);
  const ComplexVector los = los_component(g, c);
  CHECK((ch.downlink - los).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((ch.uplink - los).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("grid mismatch is a configuration error") {
  const CorrelationModel corr = correlation_matrix(GridSpec::from_fraction(4, 4, 0.5));
  RandomStream rng(1);
  CHECK_THROWS_AS(sample_channel(rng, corr, GridSpec::from_fraction(8, 8, 0.5), {}), ConfigError);
}

TEST_CASE("unit average power at 8 dB") {
  const GridSpec g = GridSpec::from_fraction(1, 1, 0.5);
  const CorrelationModel corr = correlation_matrix(g);
  RandomStream rng(2);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double p = std::norm(sample_channel(rng, corr, g, {}).downlink[0]);
    s += p;
    s2 += p * p;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 0.02);
  CHECK(std::abs(mean - 1.0) < 3 * se);
}

TEST_CASE("pure scattering neighbours follow the sinc correlation") {
  const GridSpec g = GridSpec::from_fraction(1, 2, 0.125);
  const CorrelationModel corr = correlation_matrix(g);
  RicianConfig c;
  c.kappa_db = -300.0;
  RandomStream rng(3);
  const int n = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const ComplexVector h = sample_channel(rng, corr, g, c).downlink;
    const double a = h[0].real(), b = h[1].real();
    sa += a; sb += b; saa += a * a; sbb += b * b; sab += a * b;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double r = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  const double expected = std::sin(M_PI / 4) / (M_PI / 4);
  CHECK(expected == doctest::Approx(0.9003).epsilon(1e-4));
  CHECK(std::abs(r - expected) < 0.02);
}

TEST_CASE("datasets are reproducible per sample index") {
  const GridSpec g = GridSpec::from_fraction(4, 4, 0.25);
  const CorrelationModel corr = correlation_matrix(g);
  const auto one = channel_dataset(9, corr, g, {}, 1);
  RandomStream s0 = RandomStream(9).substream(sample_label(0));
  const ChannelRealization ref = sample_channel(s0, corr, g, {});
  CHECK((one[0].downlink.array() == ref.downlink.array()).all());
  CHECK((one[0].uplink.array() == ref.uplink.array()).all());

  const auto a = channel_dataset(9, corr, g, {}, 50, Execution::serial);
  const auto b = channel_dataset(9, corr, g, {}, 50, Execution::parallel);
  const auto c = channel_dataset(9, corr, g, {}, 20, Execution::parallel);
  for (int i = 0; i < 50; ++i) {
    CHECK((a[i].downlink.array() == b[i].downlink.array()).all());
    CHECK((a[i].uplink.array() == b[i].uplink.array()).all());
  }
  for (int i = 0; i < 20; ++i) CHECK((a[i].downlink.array() == c[i].downlink.array()).all());
}

namespace {
// |E[x conj(y)]| / sqrt(E|x|^2 E|y|^2) for zero-mean parts
double complex_corr(const std::vector<cdouble>& x, const std::vector<cdouble>& y) {
  cdouble mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= double(x.size());
  my /= double(y.size());
  cdouble sxy = 0;
  double sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * std::conj(y[i] - my);
    sxx += std::norm(x[i] - mx);
    syy += std::norm(y[i] - my);
  }
  return std::abs(sxy) / std::sqrt(sxx * syy);
}
}  // namespace

TEST_CASE("samples and links are mutually uncorrelated") {
  const GridSpec g = GridSpec::from_fraction(2, 2, 0.125);
  const CorrelationModel corr = correlation_matrix(g);
  std::vector<cdouble> s0, s1;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const auto d = channel_dataset(1000 + rep, corr, g, {}, 2);
    s0.push_back(d[0].downlink[0]);
    s1.push_back(d[1].downlink[0]);
  }
  CHECK(complex_corr(s0, s1) < 0.05);

  std::vector<cdouble> down, up;
  const auto d = channel_dataset(77, corr, g, {}, 10000);
  for (const auto& ch : d) {
    down.push_back(ch.downlink[1]);
    up.push_back(ch.uplink[1]);
  }
  CHECK(complex_corr(down, up) < 0.05);
}
