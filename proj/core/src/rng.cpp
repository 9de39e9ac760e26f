#include "infnoise/rng.hpp"

#include <cmath>
#include <numbers>

namespace infnoise {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
  g.next();
  return g.next();
}

double RandomStream::uniform() { return gen_.uniform01(); }

double RandomStream::uniform_open() {
  return (static_cast<double>(gen_.next() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

double RandomStream::gamma(double shape) {
  if (shape < 1.0) {
    // Boost to shape+1 and scale back by U^{1/shape}.
    const double u = uniform_open();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::rademacher() { return (gen_.next() & 1ULL) ? 1.0 : -1.0; }

}  // namespace infnoise
