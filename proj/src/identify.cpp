#include "antidamp/identify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"

namespace antidamp {
namespace {

constexpr double kZeroRatio = 1e-13;

void require_inside(const Signal& y, double a, double b) {
  const auto [t0, t1] = signal_domain(y);
  const double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  if (a < t0 - tol || b > t1 + tol) {
    throw DomainError("window (" + format_double(a) + ", " + format_double(b) + ") outside the signal domain");
  }
}

nlohmann::json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return *v;
}

}  // namespace

nlohmann::json EstimationReport::to_json() const {
  nlohmann::json j{{"q_hat", q_hat},
                   {"f_hat", f_hat},
                   {"ratio", ratio},
                   {"norm_near", norm_near},
                   {"norm_far", norm_far},
                   {"period", period},
                   {"T1", window.T1},
                   {"T2", window.T2},
                   {"epsilon", optional_json(epsilon)},
                   {"snr", optional_json(snr)},
                   {"f_error_bound", optional_json(f_error_bound)},
                   {"warnings", warnings}};
  if (reconstruction) {
    nlohmann::json c = nlohmann::json::array();
    for (std::size_t i = 0; i < reconstruction->coeffs.size(); ++i) {
      const cplx a = reconstruction->coeffs[i];
      c.push_back({reconstruction->indices.at(i), a.real(), a.imag()});
    }
    j["reconstruction"] = {{"first", reconstruction->indices.first},
                           {"last", reconstruction->indices.last},
                           {"coeffs", c}};
  } else {
    j["reconstruction"] = nullptr;
  }
  return j;
}

EstimationReport estimate_q(const Signal& y, const SpectralModel& model, WindowSpec window,
                            const EstimationOptions& opts) {
  const double L = model.period();
  const double T1 = window.T1, T2 = window.T2;
  if (!(T1 > 0) || !(T2 > T1) || !std::isfinite(T2)) {
    throw DomainError("window needs 0 < T1 < T2, got (" + format_double(T1) + ", " + format_double(T2) + ")");
  }
  if (T1 < L * (1 - 1e-12)) {
    throw DomainError("window needs T1 >= L = " + format_double(L) + ", got T1 = " + format_double(T1));
  }
  require_inside(y, T1 - L, T2);

  EstimationReport rep;
  rep.window = window;
  rep.period = L;
  rep.norm_near = window_l2_norm(y, T1, T2);
  rep.norm_far = window_l2_norm(y, T1 - L, T2 - L);
  if (rep.norm_far == 0 || rep.norm_far < kZeroRatio * rep.norm_near) {
    throw ZeroSignalError("far-window norm vanishes: the output carries no information");
  }
  rep.ratio = rep.norm_near / rep.norm_far;
  rep.f_hat = std::log(rep.ratio) / L;
  const double q = model.growth().inverse_from_ratio(rep.ratio, L);
  bool admissible = std::isfinite(q);
  if (admissible) {
    try {
      model.check_parameter(q);
    } catch (const Error&) {
      admissible = false;
    }
  }
  if (!admissible) {
    throw PriorSetError("estimated growth rate " + format_double(rep.f_hat) + " maps outside the prior set " +
                            model.growth().prior().describe(),
                        rep.f_hat, q);
  }
  rep.q_hat = q;

  if (opts.disturbance_bound) {
    const double M = *opts.disturbance_bound;
    const auto snr = epsilon_snr(M, window, opts.clean_far_norm.value_or(rep.norm_far));
    rep.epsilon = snr.epsilon;
    rep.snr = snr.snr;
    try {
      rep.f_error_bound = error_bound_f(M, window, rep.norm_far, L);
    } catch (const BoundUnavailable& e) {
      rep.warnings.push_back(e.what());
    }
  }
  return rep;
}

ModalState reconstruct_initial(const Signal& y, const SpectralModel& model, double q_hat, double T1,
                               IndexSet indices) {
  const double L = model.period();
  if (!(T1 >= 0)) throw DomainError("reconstruction window needs T1 >= 0");
  require_inside(y, T1, T1 + L);
  model.check_parameter(q_hat);
  const double kmin = model.kappa_bounds(q_hat).first;
  std::vector<cplx> lambda(indices.size()), kappa(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::int64_t n = indices.at(i);
    lambda[i] = model.eigenvalue(q_hat, n);
    kappa[i] = model.observation(q_hat, n);
    if (std::abs(kappa[i]) < 0.5 * kmin) {
      throw CoefficientDegeneracyError("observation coefficient of mode " + std::to_string(n) +
                                       " falls below half its lower bound");
    }
  }
  const auto integrals = weighted_exponential_integrals(y, lambda, T1, T1 + L);
  ModalState out = ModalState::zero(indices);
  for (std::size_t i = 0; i < indices.size(); ++i) out.coeffs[i] = integrals[i] / (L * kappa[i]);
  return out;
}

double modal_l2_distance(const ModalState& a, const ModalState& b) {
  if (a.indices.empty() && b.indices.empty()) return 0;
  const std::int64_t lo = std::min(a.indices.empty() ? b.indices.first : a.indices.first,
                                   b.indices.empty() ? a.indices.first : b.indices.first);
  const std::int64_t hi = std::max(a.indices.last, b.indices.last);
  double s = 0;
  for (std::int64_t n = lo; n <= hi; ++n) s += std::norm(a.at(n) - b.at(n));
  return std::sqrt(s);
}

Profile synthesize_profile(const SpectralModel& model, double q, const ModalState& state, std::size_t points) {
  if (points < 2) throw DomainError("profile needs at least two points");
  const bool second = model.state_dim() == 2;
  Profile p;
  p.x.resize(points);
  p.u0.assign(points, 0.0);
  if (second) p.u1.assign(points, 0.0);
  for (std::size_t k = 0; k < points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(points - 1);
    p.x[k] = x;
    cplx u{}, v{};
    for (std::size_t i = 0; i < state.coeffs.size(); ++i) {
      if (state.coeffs[i] == cplx{}) continue;
      const auto phi = model.eigenfunction(q, state.indices.at(i), x);
      u += state.coeffs[i] * phi.u;
      v += state.coeffs[i] * phi.v;
    }
    p.u0[k] = u;
    if (second) p.u1[k] = v;
  }
  return p;
}

Profile sample_profile(const InitialData& data, bool second_order, std::size_t points) {
  if (points < 2) throw DomainError("profile needs at least two points");
  Profile p;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(points - 1);
    p.x.push_back(x);
    p.u0.push_back(data.u0(x));
    if (second_order) p.u1.push_back(data.u1(x));
  }
  return p;
}

ProfileError profile_l2_error(const Profile& estimate, const Profile& truth) {
  if (estimate.x.size() != truth.x.size() || estimate.x.size() < 2) {
    throw DomainError("profiles must share the same grid");
  }
  const double dx = estimate.x[1] - estimate.x[0];
  auto err = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::norm(a[i] - b[i]);
    return std::sqrt(trapezoid(d, dx));
  };
  ProfileError e;
  e.u0 = err(estimate.u0, truth.u0);
  if (!estimate.u1.empty() && estimate.u1.size() == truth.u1.size()) e.u1 = err(estimate.u1, truth.u1);
  return e;
}

void write_profile_csv(std::ostream& os, const Profile& p) {
  const bool second = !p.u1.empty();
  os << (second ? "x,re_u0,im_u0,re_u1,im_u1\n" : "x,re_u0,im_u0\n");
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    os << format_double(p.x[k]) << ',' << format_double(p.u0[k].real()) << ',' << format_double(p.u0[k].imag());
    if (second) os << ',' << format_double(p.u1[k].real()) << ',' << format_double(p.u1[k].imag());
    os << '\n';
  }
}

double error_bound_f(double M, WindowSpec window, double norm_far, double period) {
  if (!(M >= 0) || !(period > 0) || !(window.T2 > window.T1)) throw DomainError("invalid error-bound arguments");
  const double noise = M * std::sqrt(window.T2 - window.T1);
  const double denom = norm_far - noise;
  if (!(denom > 0)) {
    throw BoundUnavailable("disturbance energy " + format_double(noise) + " reaches the far-window norm " +
                           format_double(norm_far));
  }
  return (4.0 / period) * noise / denom;
}

SnrReport epsilon_snr(double M, WindowSpec window, double norm) {
  if (!(norm > 0)) throw ZeroSignalError("epsilon needs a positive signal norm");
  if (!(M >= 0) || !(window.T2 > window.T1)) throw DomainError("invalid epsilon arguments");
  SnrReport r;
  r.epsilon = M * std::sqrt(window.T2 - window.T1) / norm;
  r.snr = r.epsilon == 0 ? kInf : 1.0 / r.epsilon;
  return r;
}

InghamConstants ingham_constants(double gamma, double T) {
  if (!(gamma > 0) || !(T > 0)) throw DomainError("Ingham constants need gamma > 0 and T > 0");
  InghamConstants c;
  c.gamma = gamma;
  c.T = T;
  const double s = 4 * kPi * kPi / (T * T * gamma * gamma);
  c.C1 = (2 * T / kPi) * (1 - s);
  c.C2 = (8 * T / kPi) * (1 + s);
  c.gap_satisfied = T > kTwoPi / gamma;
  return c;
}

InghamCheck ingham_lower_bound_check(const ModalState& state, const EigenStructure& eigen, WindowSpec window) {
  if (state.indices != eigen.indices) throw DomainError("state and eigenstructure index sets differ");
  const GapReport gap = check_gap_condition(eigen);
  const double T = window.T2 - window.T1;
  if (!std::isfinite(gap.min_gap) || !(T > kTwoPi / gap.min_gap)) {
    throw GapWindowError("window length " + format_double(T) + " does not exceed 2 pi / gamma");
  }
  const auto c = ingham_constants(gap.min_gap, T);
  const ModalSignal s(0.0, eigen.period, eigen.harmonic, state.coeffs);
  InghamCheck r;
  r.lhs = s.l2_norm_squared(window.T1, window.T2);
  double energy = 0;
  for (const auto& a : state.coeffs) energy += std::norm(a);
  r.rhs = c.C1 * energy;
  r.holds = r.lhs >= r.rhs - 1e-10 * r.rhs;
  return r;
}

}  // namespace antidamp
