#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>

#include "soris/types.hpp"

namespace soris {

template <class Net>
concept GradientCheckable = requires(Net& net, const typename Net::Input& in,
                                     const RealVector& target, const RealVector& flat) {
  { net.loss(in, target) } -> std::convertible_to<double>;
  { net.flat_gradient(in, target) } -> std::convertible_to<RealVector>;
  { net.flat_params() } -> std::convertible_to<RealVector>;
  net.set_flat_params(flat);
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  Eigen::Index worst_parameter = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central differences on every parameter. Relative error per parameter is
// |a - n| / max(|a|, |n|, 1e-12); the largest one is reported.
template <GradientCheckable Net>
GradientCheckResult gradient_check(Net net, const typename Net::Input& input,
                                   const RealVector& target, double epsilon = 1e-5) {
  const RealVector analytic = net.flat_gradient(input, target);
  RealVector theta = net.flat_params();
  GradientCheckResult res;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + epsilon;
    net.set_flat_params(theta);
    const double up = net.loss(input, target);
    theta[i] = saved - epsilon;
    net.set_flat_params(theta);
    const double down = net.loss(input, target);
    theta[i] = saved;

    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-12});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > res.max_relative_error || res.worst_parameter < 0) {
      res.max_relative_error = rel;
      res.worst_parameter = i;
      res.analytic = analytic[i];
      res.numeric = numeric;
    }
  }
  net.set_flat_params(theta);
  return res;
}

}  // namespace soris
