#include "antidamp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"

namespace antidamp {

bool PriorSet::contains(double q) const {
  if (std::isnan(q)) return false;
  const bool above = lower_closed ? q >= lower : q > lower;
  const bool below = upper_closed ? q <= upper : q < upper;
  return above && below;
}

std::vector<double> PriorSet::interior_samples(std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  const bool lo_inf = std::isinf(lower);
  const bool hi_inf = std::isinf(upper);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(count);  // (0, 1)
    double q;
    if (!lo_inf && !hi_inf) {
      q = lower + s * (upper - lower);
    } else if (!lo_inf) {
      q = lower + s / (1.0 - s);
    } else if (!hi_inf) {
      q = upper - (1.0 - s) / s;
    } else {
      q = std::tan(kPi * (s - 0.5));
    }
    out.push_back(q);
  }
  return out;
}

std::string PriorSet::describe() const {
  std::ostringstream os;
  os << (lower_closed ? '[' : '(') << lower << ", " << upper << (upper_closed ? ']' : ')');
  return os.str();
}

GrowthMap::GrowthMap(Fn forward, Fn inverse, PriorSet prior, Fn inverse_from_ratio)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      prior_(prior),
      inverse_from_ratio_(std::move(inverse_from_ratio)) {}

double GrowthMap::inverse_from_ratio(double r, double period) const {
  if (inverse_from_ratio_) return inverse_from_ratio_(r);
  return inverse_(std::log(r) / period);
}

void GrowthMap::validate(std::size_t samples, double rel_tol) const {
  const auto qs = prior_.interior_samples(samples);
  double prev = 0;
  int direction = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double q = qs[i];
    const double f = forward(q);
    if (!std::isfinite(f)) throw DomainError("growth map not finite at q = " + format_double(q));
    const double back = inverse(f);
    if (std::abs(back - q) > rel_tol * std::max(1.0, std::abs(q))) {
      throw DomainError("growth map round trip failed at q = " + format_double(q));
    }
    if (i > 0) {
      const int d = f > prev ? 1 : (f < prev ? -1 : 0);
      if (d == 0 || (direction != 0 && d != direction)) {
        throw DomainError("growth map not strictly monotone near q = " + format_double(q));
      }
      direction = d;
    }
    prev = f;
  }
}

ModalState::ModalState(IndexSet idx, std::vector<cplx> c) : indices(idx), coeffs(std::move(c)) {
  if (coeffs.size() != indices.size()) throw DomainError("modal state size does not match its index set");
}

double ModalState::l2_norm() const {
  double s = 0;
  for (const auto& a : coeffs) s += std::norm(a);
  return std::sqrt(s);
}

EigenStructure EigenStructure::from_frequencies(double period, IndexSet indices, std::vector<double> mu,
                                                std::vector<cplx> kappa) {
  if (mu.size() != indices.size()) throw DomainError("frequency count does not match index set");
  EigenStructure e;
  e.period = period;
  e.indices = indices;
  e.harmonic.reserve(mu.size());
  for (double m : mu) e.harmonic.push_back(static_cast<std::int64_t>(std::llround(m * period / kTwoPi)));
  e.mu = std::move(mu);
  if (kappa.empty()) kappa.assign(e.mu.size(), cplx{1.0, 0.0});
  e.kappa = std::move(kappa);
  e.kappa_min = kInf;
  e.kappa_max = 0;
  for (const auto& k : e.kappa) {
    e.kappa_min = std::min(e.kappa_min, std::abs(k));
    e.kappa_max = std::max(e.kappa_max, std::abs(k));
  }
  return e;
}

SpectralModel::SpectralModel(GrowthMap growth, double singular_margin)
    : growth_(std::move(growth)), singular_margin_(singular_margin) {}

void SpectralModel::check_parameter(double q) const {
  if (!std::isfinite(q)) throw DomainError("parameter is not finite");
  for (double s : singular_points()) {
    if (std::abs(q - s) <= singular_margin_) {
      throw SingularParameterError(std::string(name()) + ": q = " + format_double(q) +
                                   " is a singular parameter value");
    }
  }
  if (!growth_.prior().contains(q)) {
    throw DomainError(std::string(name()) + ": q = " + format_double(q) + " outside prior set " +
                      growth_.prior().describe());
  }
}

cplx SpectralModel::eigenvalue(double q, std::int64_t n) const {
  check_parameter(q);
  return {growth_.forward(q), frequency(n)};
}

EigenStructure SpectralModel::eigen(double q, IndexSet indices) const {
  check_parameter(q);
  EigenStructure e;
  e.period = period();
  e.indices = indices;
  e.mu.reserve(indices.size());
  e.harmonic.reserve(indices.size());
  e.kappa.reserve(indices.size());
  for (std::int64_t n = indices.first; n <= indices.last; ++n) {
    e.mu.push_back(frequency(n));
    e.harmonic.push_back(harmonic(n));
    e.kappa.push_back(observation(q, n));
  }
  const auto [lo, hi] = kappa_bounds(q);
  e.kappa_min = lo;
  e.kappa_max = hi;
  return e;
}

cplx eigenvalue(const SpectralModel& model, double q, std::int64_t n) { return model.eigenvalue(q, n); }

GapReport check_gap_condition(const EigenStructure& eigen) {
  GapReport r;
  r.max_integer_deviation = 0;
  for (std::size_t i = 0; i < eigen.mu.size(); ++i) {
    const double x = eigen.mu[i] * eigen.period / kTwoPi;
    r.max_integer_deviation = std::max(r.max_integer_deviation, std::abs(x - std::round(x)));
    if (i + 1 < eigen.mu.size()) r.min_gap = std::min(r.min_gap, eigen.mu[i + 1] - eigen.mu[i]);
  }
  return r;
}

}  // namespace antidamp
