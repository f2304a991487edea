#pragma once

#include <cstdint>
#include <string>

namespace soris {

// Exact non-negative fraction num/den.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational reduced() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational& o) const;
};

struct WiringInputs {
  std::int64_t n = 0;
  std::int64_t n_f = 0;
  std::int64_t b_p = 0;
  std::int64_t b_m = 0;
  std::int64_t bus_rate = 0;    // bits per second
  double switch_latency = 0.0;  // seconds
};

struct WiringReport {
  WiringInputs inputs;
  std::int64_t total_wires = 0;   // N B_p + N_f B_m
  Rational signaling_overhead;    // W_t / R_b seconds, reduced
  double control_latency = 0.0;   // max(T_s, T_w) seconds
};

WiringReport wiring_report(std::int64_t n, std::int64_t n_f, std::int64_t b_p,
                           std::int64_t b_m, std::int64_t bus_rate, double switch_latency);

struct ComplexityInputs {
  std::int64_t n = 0;
  std::int64_t n_f = 0;
  std::int64_t pilots_down = 0;
  std::int64_t pilots_up = 0;
  std::int64_t epochs = 0;
  std::int64_t train_samples = 0;
  std::int64_t hidden_width = 0;   // L_H
  std::int64_t hidden_units = 0;   // R_h
};

struct ComplexityReport {
  ComplexityInputs inputs;
  std::string runtime_order;
  std::string training_order;
  std::string space_order;
  std::int64_t runtime_correlation = 0;  // N^2
  std::int64_t runtime_acquisition = 0;  // N_f (L + L_u + 1)
  std::int64_t runtime_total = 0;
  std::string runtime_dominant;
  std::int64_t training_ops = 0;         // N_e N_s N L_H^2
  std::int64_t inference_ops = 0;        // N R_h
  std::int64_t space_correlation = 0;    // N^2
  std::int64_t space_model = 0;          // N R_h + R_h^2
  std::int64_t space_total = 0;
  std::string space_dominant;
};

ComplexityReport complexity_report(const ComplexityInputs& in);

}  // namespace soris
