#pragma once

// Exponentially weighted integrals of uniformly sampled data.
//
// The data g is replaced by its piecewise-quadratic interpolant on panels of two
// grid intervals, and each panel integral of g(x) e^{s x} is evaluated exactly.
// For s = 0 on whole panels this is composite Simpson; for large |s| h it stays
// accurate where Simpson on the oscillatory product would alias.

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace antidamp {

using cplx = std::complex<double>;

template <typename T>
struct UniformSamples {
  double start = 0;
  double step = 1;
  std::span<const T> values;

  double end() const { return start + step * static_cast<double>(values.size() - 1); }
};

/// M_k = int_u^v sigma^k e^{z sigma} d sigma for k = 0, 1, 2.
std::array<cplx, 3> exp_moments(cplx z, double u, double v);

/// Weights W_k = int_lo^hi l_k(sigma) e^{z sigma} d sigma for the quadratic
/// Lagrange basis l_k on nodes 0, 1, 2.
std::array<cplx, 3> panel_weights(cplx z, double lo, double hi);

/// int_a^b g(x) e^{s x} dx. [a, b] must lie inside the sample range; at least
/// three samples are required.
cplx exp_weighted_integral(const UniformSamples<cplx>& g, cplx s, double a, double b);

/// Same integral for several exponents at once; out[i] pairs with s[i].
void exp_weighted_integrals(const UniformSamples<cplx>& g, std::span<const cplx> s, double a, double b,
                            std::span<cplx> out);

/// int_a^b g(x) dx with the same interpolant (Simpson on aligned panels).
double integrate_samples(const UniformSamples<double>& g, double a, double b);

/// Composite Simpson over the full sample range; odd interval counts close
/// with the quadratic through the last three nodes.
double simpson(std::span<const double> values, double step);

}  // namespace antidamp
