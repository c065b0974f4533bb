#include "antidamp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"

namespace antidamp {
namespace {

constexpr double kSnap = 1e-9;  // sigma units; windows closer than this to a node are treated as aligned
constexpr int kReanchor = 64;

struct PanelPiece {
  std::size_t node;  // first node of the panel
  double lo, hi;     // sigma range inside [0, 2]
  bool full;
};

// Panels of two intervals over the nodes; an odd interval count closes with the
// quadratic through the last three nodes, restricted to its final interval.
template <typename T>
std::vector<PanelPiece> panel_pieces(const UniformSamples<T>& g, double a, double b) {
  const std::size_t n = g.values.size();
  if (n < 3) throw DomainError("at least three samples are required for quadrature");
  const double h = g.step;
  const double tol = 1e-9 * std::max(1.0, std::abs(g.end()));
  if (!(a < b) || a < g.start - tol || b > g.end() + tol) {
    throw DomainError("integration window outside the sampled range");
  }
  const std::size_t intervals = n - 1;
  const std::size_t full_panels = intervals / 2;
  std::vector<PanelPiece> out;

  auto clip = [&](std::size_t node, double panel_lo) {
    const double xp = g.start + h * static_cast<double>(node);
    double lo = std::max(panel_lo, (a - xp) / h);
    double hi = std::min(2.0, (b - xp) / h);
    if (std::abs(lo - panel_lo) < kSnap) lo = panel_lo;
    if (std::abs(hi - 2.0) < kSnap) hi = 2.0;
    if (std::abs(lo - std::round(lo)) < kSnap) lo = std::round(lo);
    if (std::abs(hi - std::round(hi)) < kSnap) hi = std::round(hi);
    if (hi > lo) out.push_back({node, lo, hi, lo == panel_lo && hi == 2.0 && panel_lo == 0.0});
  };

  const double first = std::floor((a - g.start) / (2 * h)) - 1;
  const double last = std::ceil((b - g.start) / (2 * h)) + 1;
  const std::size_t p0 = static_cast<std::size_t>(std::max(0.0, first));
  const std::size_t p1 = std::min(full_panels, static_cast<std::size_t>(std::max(0.0, last)));
  for (std::size_t p = p0; p < p1; ++p) clip(2 * p, 0.0);
  if (intervals % 2 == 1) clip(n - 3, 1.0);
  return out;
}

struct Weights {
  cplx w0, w1, w2;
};

Weights lagrange_weights(const std::array<cplx, 3>& m) {
  return {0.5 * (m[2] - 3.0 * m[1] + 2.0 * m[0]), 2.0 * m[1] - m[2], 0.5 * (m[2] - m[1])};
}

}  // namespace

std::array<cplx, 3> exp_moments(cplx z, double u, double v) {
  const double span = std::max(std::abs(u), std::abs(v));
  if (std::abs(z) * span <= 1.0) {
    // Taylor: sum_j z^j / j! (v^{k+j+1} - u^{k+j+1}) / (k+j+1)
    // |z| span <= 1, so 26 terms leave a remainder below 1/26!.
    std::array<cplx, 3> m{};
    cplx zj = 1.0;  // z^j / j!
    std::array<double, 3> upow{u, u * u, u * u * u};
    std::array<double, 3> vpow{v, v * v, v * v * v};
    for (int j = 0; j < 26; ++j) {
      for (int k = 0; k < 3; ++k) {
        m[k] += zj * ((vpow[k] - upow[k]) / static_cast<double>(k + j + 1));
        upow[k] *= u;
        vpow[k] *= v;
      }
      zj *= z / static_cast<double>(j + 1);
    }
    return m;
  }
  const cplx iz = 1.0 / z;
  const cplx iz2 = iz * iz;
  const cplx iz3 = iz2 * iz;
  auto prim = [&](double s) -> std::array<cplx, 3> {
    const cplx e = cexp(z * s);
    return {e * iz, e * (s * iz - iz2), e * (s * s * iz - 2.0 * s * iz2 + 2.0 * iz3)};
  };
  const auto pv = prim(v);
  const auto pu = prim(u);
  return {pv[0] - pu[0], pv[1] - pu[1], pv[2] - pu[2]};
}

std::array<cplx, 3> panel_weights(cplx z, double lo, double hi) {
  const Weights w = lagrange_weights(exp_moments(z, lo, hi));
  return {w.w0, w.w1, w.w2};
}

void exp_weighted_integrals(const UniformSamples<cplx>& g, std::span<const cplx> s, double a, double b,
                            std::span<cplx> out) {
  if (out.size() != s.size()) throw DomainError("output size mismatch");
  const auto pieces = panel_pieces(g, a, b);
  const double h = g.step;
  const auto& y = g.values;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const cplx si = s[i];
    const cplx z = si * h;
    const Weights full = lagrange_weights(exp_moments(z, 0.0, 2.0));
    const cplx advance = cexp(2.0 * z);
    cplx acc{};
    cplx factor{};
    std::size_t expected_node = static_cast<std::size_t>(-1);
    int since_anchor = 0;
    for (const auto& pc : pieces) {
      const double xp = g.start + h * static_cast<double>(pc.node);
      if (pc.node == expected_node && since_anchor < kReanchor) {
        factor *= advance;
        ++since_anchor;
      } else {
        factor = cexp(si * xp);
        since_anchor = 0;
      }
      expected_node = pc.node + 2;
      const Weights w = pc.full ? full : lagrange_weights(exp_moments(z, pc.lo, pc.hi));
      acc += factor * (w.w0 * y[pc.node] + w.w1 * y[pc.node + 1] + w.w2 * y[pc.node + 2]);
    }
    out[i] = acc * h;
  }
}

cplx exp_weighted_integral(const UniformSamples<cplx>& g, cplx s, double a, double b) {
  cplx out;
  exp_weighted_integrals(g, std::span<const cplx>(&s, 1), a, b, std::span<cplx>(&out, 1));
  return out;
}

double integrate_samples(const UniformSamples<double>& g, double a, double b) {
  const auto pieces = panel_pieces(g, a, b);
  const auto& y = g.values;
  double acc = 0;
  for (const auto& pc : pieces) {
    double w0, w1, w2;
    if (pc.full) {
      w0 = 1.0 / 3.0;
      w1 = 4.0 / 3.0;
      w2 = 1.0 / 3.0;
    } else {
      const auto m = exp_moments(0.0, pc.lo, pc.hi);
      w0 = 0.5 * (m[2].real() - 3.0 * m[1].real() + 2.0 * m[0].real());
      w1 = 2.0 * m[1].real() - m[2].real();
      w2 = 0.5 * (m[2].real() - m[1].real());
    }
    acc += w0 * y[pc.node] + w1 * y[pc.node + 1] + w2 * y[pc.node + 2];
  }
  return acc * g.step;
}

double simpson(std::span<const double> values, double step) {
  UniformSamples<double> g{0.0, step, values};
  return integrate_samples(g, 0.0, g.end());
}

}  // namespace antidamp
