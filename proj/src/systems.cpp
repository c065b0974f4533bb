#include "antidamp/systems.hpp"

#include <cmath>

#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"
#include "antidamp/quadrature.hpp"

namespace antidamp::systems {
namespace {

const double kSqrt2 = std::sqrt(2.0);

bool inside(const PriorSet& p, double lo, double hi) { return p.lower >= lo && p.upper <= hi; }

std::size_t odd_points(std::size_t n) {
  if (n < 3) n = 3;
  return n % 2 == 1 ? n : n + 1;
}

struct Grid {
  double start, step;
  std::vector<double> x;
};

Grid uniform_grid(double a, double b, std::size_t points) {
  Grid g{a, (b - a) / static_cast<double>(points - 1), {}};
  g.x.resize(points);
  for (std::size_t i = 0; i < points; ++i) g.x[i] = a + g.step * static_cast<double>(i);
  g.x.back() = b;
  return g;
}

std::vector<cplx> integrals(const Grid& g, const std::vector<cplx>& values, const std::vector<cplx>& s) {
  std::vector<cplx> out(s.size());
  exp_weighted_integrals(UniformSamples<cplx>{g.start, g.step, values}, s, g.x.front(), g.x.back(), out);
  return out;
}

void require_finite(const ModalState& m, std::string_view model) {
  for (const auto& a : m.coeffs) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw NumericalError(std::string(model) + ": non-finite modal projection (initial data not of finite energy?)");
    }
  }
}

void require_velocity(const InitialData& data, std::string_view model) {
  if (!data.has_velocity()) throw DomainError(std::string(model) + " needs initial displacement and velocity");
}

GrowthMap wave_growth(const PriorSet& prior, WaveModel::Branch branch) {
  if (branch == WaveModel::Branch::Intermediate) {
    return GrowthMap([](double q) { return std::atanh(q); }, [](double f) { return std::tanh(f); }, prior,
                     [](double r) {
                       const double s = std::sqrt(r);  // r = e^{4 f}
                       return (s - 1.0) / (s + 1.0);
                     });
  }
  return GrowthMap([](double q) { return 0.5 * std::log((1.0 + q) / (q - 1.0)); },
                   [](double f) { return 1.0 / std::tanh(f); }, prior,
                   [](double r) { return (r + 1.0) / (r - 1.0); });
}

WaveModel::Branch wave_branch(const PriorSet& prior) {
  if (inside(prior, 1.0, kInf)) return WaveModel::Branch::AntiStable;
  if (inside(prior, -kInf, -1.0)) return WaveModel::Branch::Stable;
  if (inside(prior, 0.0, 1.0)) return WaveModel::Branch::Intermediate;
  throw DomainError("wave prior set " + prior.describe() + " must lie inside (1, inf), (0, 1) or (-inf, -1)");
}

}  // namespace

// ---------------------------------------------------------------- wave

WaveModel::WaveModel(PriorSet prior, double singular_margin)
    : SpectralModel(wave_growth(prior, wave_branch(prior)), singular_margin), branch_(wave_branch(prior)) {
  growth().validate();
}

double WaveModel::period() const { return branch_ == Branch::Intermediate ? 4.0 : 2.0; }

double WaveModel::frequency(std::int64_t n) const {
  if (branch_ == Branch::Intermediate) return (2.0 * static_cast<double>(n) + 1.0) * kPi / 2.0;
  return static_cast<double>(n) * kPi;
}

std::int64_t WaveModel::harmonic(std::int64_t n) const { return branch_ == Branch::Intermediate ? 2 * n + 1 : n; }

StateValue WaveModel::eigenfunction(double q, std::int64_t n, double x) const {
  if (x < 0.0 || x > 1.0) throw DomainError("eigenfunction position outside [0, 1]");
  const cplx lam = eigenvalue(q, n);
  const cplx s = csinh(lam * x);
  return {s / lam, s};
}

ModalState WaveModel::project(double q, const InitialData& data, IndexSet indices,
                              const ProjectionOptions& opts) const {
  check_parameter(q);
  require_velocity(data, name());
  // a_n = int u0' cosh(lambda x) - u1 sinh(lambda x)
  //     = 1/2 int (u0' - u1) e^{lambda x} + 1/2 int (u0' + u1) e^{-lambda x}
  const Grid g = uniform_grid(0.0, 1.0, odd_points(opts.quadrature_points));
  std::vector<cplx> minus(g.x.size()), plus(g.x.size());
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const cplx d = data.du0(g.x[i]);
    const cplx v = data.u1(g.x[i]);
    minus[i] = d - v;
    plus[i] = d + v;
  }
  std::vector<cplx> s_pos, s_neg;
  for (std::int64_t n = indices.first; n <= indices.last; ++n) {
    const cplx lam = eigenvalue(q, n);
    s_pos.push_back(lam);
    s_neg.push_back(-lam);
  }
  const auto ip = integrals(g, minus, s_pos);
  const auto in = integrals(g, plus, s_neg);
  ModalState out = ModalState::zero(indices);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = 0.5 * (ip[i] + in[i]);
  require_finite(out, name());
  return out;
}

// ---------------------------------------------------------------- Schrodinger

SchrodingerModel::SchrodingerModel(PriorSet prior)
    : SpectralModel(GrowthMap([](double q) { return q; }, [](double f) { return f; }, prior,
                              [](double r) { return std::log(r) * kPi / 8.0; }),
                    0.0) {
  if (!inside(prior, 0.0, kInf)) throw DomainError("Schrodinger prior set must lie inside (0, inf)");
  growth().validate();
}

double SchrodingerModel::period() const { return 8.0 / kPi; }

double SchrodingerModel::frequency(std::int64_t n) const {
  const double k = (static_cast<double>(n) - 0.5) * kPi;
  return k * k;
}

std::int64_t SchrodingerModel::harmonic(std::int64_t n) const { return (2 * n - 1) * (2 * n - 1); }

cplx SchrodingerModel::observation(double, std::int64_t) const { return kSqrt2; }

std::pair<double, double> SchrodingerModel::kappa_bounds(double) const { return {kSqrt2, kSqrt2}; }

StateValue SchrodingerModel::eigenfunction(double q, std::int64_t n, double x) const {
  if (x < 0.0 || x > 1.0) throw DomainError("eigenfunction position outside [0, 1]");
  check_parameter(q);
  return {kSqrt2 * std::cos((static_cast<double>(n) - 0.5) * kPi * x), 0.0};
}

ModalState SchrodingerModel::project(double q, const InitialData& data, IndexSet indices,
                                     const ProjectionOptions& opts) const {
  check_parameter(q);
  if (indices.first < 1) throw DomainError("Schrodinger modes are indexed from 1");
  const Grid g = uniform_grid(0.0, 1.0, odd_points(opts.quadrature_points));
  std::vector<cplx> u(g.x.size());
  for (std::size_t i = 0; i < g.x.size(); ++i) u[i] = data.u0(g.x[i]);
  std::vector<cplx> s_pos, s_neg;
  for (std::int64_t n = indices.first; n <= indices.last; ++n) {
    const double k = (static_cast<double>(n) - 0.5) * kPi;
    s_pos.emplace_back(0.0, k);
    s_neg.emplace_back(0.0, -k);
  }
  const auto ip = integrals(g, u, s_pos);
  const auto in = integrals(g, u, s_neg);
  ModalState out = ModalState::zero(indices);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = (kSqrt2 / 2.0) * (ip[i] + in[i]);
  require_finite(out, name());
  return out;
}

// ---------------------------------------------------------------- coupled strings

StringsModel::StringsModel(PriorSet prior, double singular_margin)
    : SpectralModel(GrowthMap([](double q) { return 0.5 * std::log((q + 2.0) / (q - 2.0)); },
                              [](double f) { return 2.0 / std::tanh(f); }, prior,
                              [](double r) { return 2.0 * (r + 1.0) / (r - 1.0); }),
                    singular_margin) {
  if (!inside(prior, 2.0, kInf)) throw DomainError("strings prior set must lie inside (2, inf)");
  growth().validate();
}

double StringsModel::frequency(std::int64_t n) const { return static_cast<double>(n) * kPi; }

cplx StringsModel::observation(double q, std::int64_t n) const { return kSqrt2 * ccosh(0.5 * eigenvalue(q, n)); }

std::pair<double, double> StringsModel::kappa_bounds(double q) const {
  const double r = std::pow((q + 2.0) / (q - 2.0), 0.25);
  return {kSqrt2 / 2.0 * (r - 1.0 / r), kSqrt2 / 2.0 * (r + 1.0 / r)};
}

StateValue StringsModel::eigenfunction(double q, std::int64_t n, double x) const {
  if (x < 0.0 || x > 1.0) throw DomainError("eigenfunction position outside [0, 1]");
  const cplx lam = eigenvalue(q, n);
  cplx phi;
  if (x <= 0.5) {
    phi = kSqrt2 / lam * ccosh(0.5 * lam) * csinh(lam * x);
  } else {
    phi = kSqrt2 / lam * csinh(0.5 * lam) * ccosh(lam * (1.0 - x));
  }
  return {phi, lam * phi};
}

ModalState StringsModel::project(double q, const InitialData& data, IndexSet indices,
                                 const ProjectionOptions& opts) const {
  check_parameter(q);
  require_velocity(data, name());
  // a_n = int u0' phi_n' - lambda_n int u1 phi_n, split at the joint.
  const std::size_t pts = odd_points(opts.quadrature_points);
  const Grid left = uniform_grid(0.0, 0.5, pts);
  const Grid right = uniform_grid(0.5, 1.0, pts);
  std::vector<cplx> l_minus(pts), l_plus(pts), r_plus(pts), r_minus(pts);
  for (std::size_t i = 0; i < pts; ++i) {
    const cplx dl = data.du0(left.x[i]), vl = data.u1(left.x[i]);
    l_minus[i] = dl - vl;
    l_plus[i] = dl + vl;
    // right-hand limits at the joint
    const double xr = i == 0 ? std::nextafter(0.5, 1.0) : right.x[i];
    const cplx dr = data.du0(xr), vr = data.u1(xr);
    r_plus[i] = dr + vr;
    r_minus[i] = vr - dr;
  }
  std::vector<cplx> s_pos, s_neg, lams;
  for (std::int64_t n = indices.first; n <= indices.last; ++n) {
    const cplx lam = eigenvalue(q, n);
    lams.push_back(lam);
    s_pos.push_back(lam);
    s_neg.push_back(-lam);
  }
  const auto lp = integrals(left, l_minus, s_pos);
  const auto ln = integrals(left, l_plus, s_neg);
  const auto rn = integrals(right, r_plus, s_neg);
  const auto rp = integrals(right, r_minus, s_pos);
  ModalState out = ModalState::zero(indices);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const cplx lam = lams[i];
    const cplx c = ccosh(0.5 * lam), s = csinh(0.5 * lam);
    const cplx left_part = kSqrt2 * c * 0.5 * (lp[i] + ln[i]);
    const cplx right_part = -kSqrt2 * s * 0.5 * (cexp(lam) * rn[i] + cexp(-lam) * rp[i]);
    out.coeffs[i] = left_part + right_part;
  }
  require_finite(out, name());
  return out;
}

// ---------------------------------------------------------------- factory

PriorSet default_prior(const std::string& system, double q) {
  if (system == "wave") {
    if (q > 1.0) return {1.0, kInf, false, false};
    if (q < -1.0) return {-kInf, -1.0, false, false};
    if (q > 0.0 && q < 1.0) return {0.0, 1.0, false, false};
    throw DomainError("wave: q = " + format_double(q) + " has no admissible branch");
  }
  if (system == "schrodinger") return {0.0, kInf, false, false};
  if (system == "strings") return {2.0, kInf, false, false};
  throw ConfigError("unknown system '" + system + "'");
}

std::unique_ptr<SpectralModel> make_model(const std::string& system, const PriorSet& prior) {
  if (system == "wave") return std::make_unique<WaveModel>(prior);
  if (system == "schrodinger") return std::make_unique<SchrodingerModel>(prior);
  if (system == "strings") return std::make_unique<StringsModel>(prior);
  throw ConfigError("unknown system '" + system + "'");
}

}  // namespace antidamp::systems

namespace antidamp {

ModalState project_initial(const SpectralModel& model, double q, const InitialData& data, IndexSet indices,
                           const ProjectionOptions& opts) {
  return model.project(q, data, indices, opts);
}

StateValue evaluate_eigenfunction(const SpectralModel& model, double q, std::int64_t n, double x) {
  return model.eigenfunction(q, n, x);
}

cplx observation_coefficient(const SpectralModel& model, double q, std::int64_t n) {
  return model.observation(q, n);
}

}  // namespace antidamp
