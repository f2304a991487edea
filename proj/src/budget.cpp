#include "soris/budget.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soris/error.hpp"

namespace soris {

Rational Rational::reduced() const {
  if (num == 0) return {0, 1};
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

bool Rational::operator==(const Rational& o) const {
  const Rational a = reduced(), b = o.reduced();
  return a.num == b.num && a.den == b.den;
}

WiringReport wiring_report(std::int64_t n, std::int64_t n_f, std::int64_t b_p,
                           std::int64_t b_m, std::int64_t bus_rate, double switch_latency) {
  if (n < 1) throw ConfigError("N must be positive");
  if (n_f < 0 || n_f > n) throw ConfigError("N_f must lie in [0, N]");
  if (b_p < 0 || b_m < 0) throw ConfigError("bit widths must be non-negative");
  if (bus_rate < 1) throw ConfigError("bus rate must be positive");
  if (!(switch_latency >= 0.0) || !std::isfinite(switch_latency))
    throw ConfigError("switch latency must be a finite non-negative time");

  WiringReport r;
  r.inputs = {n, n_f, b_p, b_m, bus_rate, switch_latency};
  r.total_wires = n * b_p + n_f * b_m;
  r.signaling_overhead = Rational{r.total_wires, bus_rate}.reduced();
  r.control_latency = std::max(r.signaling_overhead.value(), switch_latency);
  return r;
}

ComplexityReport complexity_report(const ComplexityInputs& in) {
  if (in.n < 1 || in.pilots_down < 1 || in.pilots_up < 1 || in.epochs < 1 ||
      in.train_samples < 1 || in.hidden_width < 1 || in.hidden_units < 1)
    throw ConfigError("complexity parameters must be positive");
  if (in.n_f < 0 || in.n_f > in.n) throw ConfigError("N_f must lie in [0, N]");

  ComplexityReport r;
  r.inputs = in;
  r.runtime_order = in.n_f == 0 ? "O(N^2)" : "O(N^2 + N_f(L + L_u + 1))";
  r.training_order = "O(N_e N_s N L_H^2)";
  r.space_order = "O(max(N^2, N R_h + R_h^2))";

  r.runtime_correlation = in.n * in.n;
  r.runtime_acquisition = in.n_f * (in.pilots_down + in.pilots_up + 1);
  r.runtime_total = r.runtime_correlation + r.runtime_acquisition;
  r.runtime_dominant = r.runtime_correlation >= r.runtime_acquisition ? "N^2" : "N_f(L + L_u + 1)";

  r.training_ops = in.epochs * in.train_samples * in.n * in.hidden_width * in.hidden_width;

  r.inference_ops = in.n * in.hidden_units;

  r.space_correlation = in.n * in.n;
  r.space_model = in.n * in.hidden_units + in.hidden_units * in.hidden_units;
  r.space_total = std::max(r.space_correlation, r.space_model);
  r.space_dominant = r.space_model > r.space_correlation ? "N R_h + R_h^2" : "N^2";
  return r;
}

}  // namespace soris
