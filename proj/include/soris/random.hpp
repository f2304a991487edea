#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "soris/types.hpp"

namespace soris {

// Derives an independent stream seed from a parent seed and a stable label
// ("train", "eval", "trial:17", ...). Results do not depend on the order in
// which streams are created, so parallel workers can derive their own.
std::uint64_t split_seed(std::uint64_t parent, std::string_view label);

// Seeded random stream. Gaussian draws use Box-Muller on 53-bit uniforms
// so values are identical across standard library implementations.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Child stream keyed by label; does not advance this stream.
  RandomStream substream(std::string_view label) const {
    return RandomStream(split_seed(seed_, label));
  }

  // Uniform in [0, 1).
  double uniform();
  // Uniform in (0, 1].
  double uniform_open_low();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Real N(0, 1).
  double normal();
  // Circularly symmetric complex Gaussian, E|z|^2 = 1.
  cdouble complex_normal();

  ComplexVector complex_normal_vector(Eigen::Index n);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace soris
