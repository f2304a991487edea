#pragma once

#include <cmath>

#include "soris/types.hpp"

namespace soris {

// Helpers shared by parameter bundles that expose
//   template <class F> void visit(F&& f)           (each tensor, in order)
//   template <class F> void visit(F&& f) const
//   template <class F> static void visit2(A&, B&, F&&)  (paired tensors)

template <class Params>
Eigen::Index parameter_count(const Params& p) {
  Eigen::Index n = 0;
  p.visit([&](const auto& t) { n += t.size(); });
  return n;
}

template <class Params>
RealVector flatten(const Params& p) {
  RealVector out(parameter_count(p));
  Eigen::Index at = 0;
  p.visit([&](const auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) out[at++] = t.data()[i];
  });
  return out;
}

template <class Params>
void unflatten(Params& p, const RealVector& flat) {
  Eigen::Index at = 0;
  p.visit([&](auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = flat[at++];
  });
}

template <class Params>
Params zeros_like(const Params& p) {
  Params z = p;
  z.visit([](auto& t) { t.setZero(); });
  return z;
}

// p -= lr * grad
template <class Params>
void sgd_update(Params& p, const Params& grad, double lr) {
  Params::visit2(p, grad, [lr](auto& w, const auto& g) { w -= lr * g; });
}

template <class Params>
bool all_finite(const Params& p) {
  bool ok = true;
  p.visit([&](const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

// Glorot-uniform fill, limit sqrt(6 / (fan_in + fan_out)).
template <class Rng>
void glorot_uniform(RealMatrix& w, Rng& rng, double fan_in, double fan_out) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w.data()[i] = limit * (2.0 * rng.uniform() - 1.0);
}

}  // namespace soris
