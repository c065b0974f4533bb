#include "antidamp/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace antidamp {

cplx exprel(cplx w) {
  if (std::abs(w) < 0.5) {
    // 1 + w/2! + w^2/3! + ...
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 2; k < 30; ++k) {
      term *= w / static_cast<double>(k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (cexp(w) - 1.0) / w;
}

cplx harmonic_phase(std::int64_t k, double t, double period) {
  const double cycles = static_cast<double>(k) * (t / period);
  const double frac = cycles - std::floor(cycles);
  const double arg = kTwoPi * frac;
  return {std::cos(arg), std::sin(arg)};
}

double trapezoid(std::span<const double> samples, double step) {
  if (samples.size() < 2) return 0.0;
  double s = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) s += samples[i];
  return s * step;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace antidamp
