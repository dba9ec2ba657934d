#include "selectmax/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selectmax::model {

ModelParams make_params(double lambda, double d, int k) {
  if (!std::isfinite(lambda) || !(lambda > 0.0))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!std::isfinite(d) || !(d > 0.0))
    throw std::invalid_argument("distortion must be positive and finite");
  const double delta = 1.0 / d - lambda;
  if (delta < 0.0)
    throw std::invalid_argument("distortion must not exceed 1/lambda");
  if (k < 1)
    throw std::invalid_argument("channel count must be at least 1");
  return ModelParams{lambda, d, delta, k};
}

double sample_source(double lambda, double u) {
  return -std::log(u) / lambda;
}

double sample_channel_output(double x, double delta, double u) {
  if (delta == 0.0) return 0.0;
  if (u <= std::exp(-delta * x)) return 0.0;
  return x + std::log(u) / delta;
}

double select_max(std::span<const double> outputs) {
  if (outputs.empty()) return 0.0;
  return *std::max_element(outputs.begin(), outputs.end());
}

namespace {

// SplitMix64 finalizer (Stafford variant 13); bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

}  // namespace

double UniformStream::uniform(std::uint64_t trial, std::uint64_t substream) const {
  std::uint64_t h = mix64(seed_ + kGolden);
  h = mix64(h ^ (trial * kGolden + 1));
  h = mix64(h ^ (substream * kGolden + 2));
  // Top 53 bits shifted into (0, 1]: u is never 0, so log(u) stays finite.
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

}  // namespace selectmax::model
