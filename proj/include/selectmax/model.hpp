#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace selectmax::model {

/// Validated parameter set for the one-sided exponential source and its
/// rate-distortion test channels.
///
///   lambda : source rate (the source has mean 1/lambda)
///   d      : per-channel distortion, 0 < d <= 1/lambda
///   delta  : forward-channel exponent rate, 1/d - lambda (>= 0)
///   k      : number of parallel channels
struct ModelParams {
  double lambda = 1.0;
  double d = 0.5;
  double delta = 1.0;
  int k = 1;
};

/// Validates the constraints and derives delta. Throws std::invalid_argument
/// with a distinct message per violated constraint.
ModelParams make_params(double lambda, double d, int k);

/// Inverse-transform draw from Exp(lambda): -ln(u)/lambda. u must lie in (0,1].
double sample_source(double lambda, double u);

/// Inverse-transform draw from the forward test channel
/// F(y|x) = exp(delta*(y-x)) on [0, x]. The atom at y = 0, of mass
/// exp(-delta*x), is returned as an exact 0.0; the continuous branch lands in
/// (0, x]. delta == 0 is the zero-information channel and always returns 0.
double sample_channel_output(double x, double delta, double u);

/// Maximum of the outputs; 0 for an empty list (zero received descriptions).
double select_max(std::span<const double> outputs);

/// Deterministic, addressable source of uniform (0,1] variates.
///
/// Each (trial, substream) address maps to one fixed variate for a given seed,
/// independent of evaluation order, so batches can be partitioned across
/// workers arbitrarily without changing a single draw.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : seed_(seed) {}

  /// Uniform variate in (0, 1] for the given address. Pure function.
  double uniform(std::uint64_t trial, std::uint64_t substream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// One simulated draw through the k channels.
struct TrialRecord {
  double x = 0.0;               // source realization
  std::vector<double> outputs;  // y_1..y_k, each in [0, x]
  double estimate = 0.0;        // max over the selected subset of outputs
  double error = 0.0;           // x - estimate, >= 0
  std::optional<std::uint64_t> received;  // bit c set => channel c received (erasure runs)
};

/// Per-trial projection consumed by the independence tests.
struct TrialProjection {
  double estimate = 0.0;    // y_hat
  double error = 0.0;       // z = x - y_hat
  double second_max = 0.0;  // largest output among the non-argmax channels
};

}  // namespace selectmax::model
