#pragma once

// Test-side numeric oracles, kept independent of the library implementations
// they check against.

#include <cmath>
#include <cstdint>
#include <functional>

namespace oracles {

using Fn = std::function<double(double)>;

namespace detail {

inline double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const Fn& f, double a, double b, double fa, double fm,
                    double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * eps)
    return left + right + diff / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const Fn& f, double a, double b, double eps = 1e-10) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return detail::adapt(f, a, b, fa, fm, fb,
                       detail::simpson(fa, fm, fb, b - a), eps, 48);
}

/// Central-difference derivative.
inline double derivative(const Fn& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Independent copy of the splitmix64 finalizer chain the uniform stream is
/// specified to use; pinned here so any drift in the library is caught.
inline std::uint64_t reference_mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline double reference_uniform(std::uint64_t seed, std::uint64_t trial,
                                std::uint64_t substream) {
  constexpr std::uint64_t g = 0x9E3779B97F4A7C15ull;
  std::uint64_t h = reference_mix64(seed + g);
  h = reference_mix64(h ^ (trial * g + 1));
  h = reference_mix64(h ^ (substream * g + 2));
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

}  // namespace oracles
