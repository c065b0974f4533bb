#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>

namespace antidamp {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// e^z as e^{Re z} (cos Im z + i sin Im z).
inline cplx cexp(cplx z) {
  const double m = std::exp(z.real());
  return {m * std::cos(z.imag()), m * std::sin(z.imag())};
}
inline cplx ccosh(cplx z) { return 0.5 * (cexp(z) + cexp(-z)); }
inline cplx csinh(cplx z) { return 0.5 * (cexp(z) - cexp(-z)); }

/// (e^w - 1) / w, with the removable singularity at w = 0.
cplx exprel(cplx w);

/// e^{i 2 pi frac(K t / L)}: the phase of e^{i mu t} for mu = 2 pi K / L with
/// the integer part of the cycle count removed before the trig call.
cplx harmonic_phase(std::int64_t k, double t, double period);

/// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> samples, double step);

/// 17 significant digits, round-trip exact for doubles.
std::string format_double(double v);
/// Shortest representation that round-trips (used for file names).
std::string format_short(double v);

}  // namespace antidamp
