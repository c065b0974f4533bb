#include "antidamp/signal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"
#include "antidamp/quadrature.hpp"

namespace antidamp {
namespace {

constexpr double kOverflowExponent = 700.0;
constexpr double kSmallArgument = 0.5;  // |z| (b - a) below this uses exprel
constexpr int kReanchor = 64;

void require_window(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("window requires finite a < b, got (" + format_double(a) + ", " + format_double(b) + ")");
  }
}

// e^{f t} e^{i 2 pi K t / L}
cplx mode_exp(double f, std::int64_t k, double t, double period) {
  return std::exp(f * t) * harmonic_phase(k, t, period);
}

// int_a^b e^{z t} dt given e^{z a}, e^{z b}.
cplx exp_integral(cplx z, cplx ea, cplx eb, double len) {
  if (std::abs(z) * len < kSmallArgument) return ea * len * exprel(z * len);
  return (eb - ea) / z;
}

void check_exponent(double x, const char* what) {
  if (x > kOverflowExponent) throw OverflowError(std::string(what) + ": exponent exceeds the representable range");
}

}  // namespace

// ---------------------------------------------------------------- ModalSignal

ModalSignal::ModalSignal(const SpectralModel& model, double q, const ModalState& state)
    : f_(model.growth().forward((model.check_parameter(q), q))), period_(model.period()) {
  k_.reserve(state.coeffs.size());
  b_.reserve(state.coeffs.size());
  for (std::size_t i = 0; i < state.coeffs.size(); ++i) {
    const std::int64_t n = state.indices.at(i);
    k_.push_back(model.harmonic(n));
    b_.push_back(state.coeffs[i] * model.observation(q, n));
  }
  *this = ModalSignal(f_, period_, std::move(k_), std::move(b_));
}

ModalSignal::ModalSignal(double growth, double period, std::vector<std::int64_t> harmonic, std::vector<cplx> weight)
    : f_(growth), period_(period), k_(std::move(harmonic)), b_(std::move(weight)) {
  if (k_.size() != b_.size()) throw DomainError("harmonic and weight arrays differ in length");
  if (!(period_ > 0)) throw DomainError("period must be positive");
  for (std::size_t i = 1; i < k_.size(); ++i) {
    if (k_[i] <= k_[i - 1]) throw DomainError("harmonics must be strictly increasing");
  }
  step_ = k_.size() >= 2 ? k_[1] - k_[0] : 1;
  for (std::size_t i = 2; i < k_.size() && step_ > 0; ++i) {
    if (k_[i] - k_[i - 1] != step_) step_ = 0;
  }
  if (step_ > 0) {
    const std::size_t n = b_.size();
    std::vector<cplx> c(n);
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc{};
      for (std::size_t i = 0; i + j < n; ++i) acc += b_[i + j] * std::conj(b_[i]);
      c[j] = acc;
    }
    autocorr_ = std::make_shared<const std::vector<cplx>>(std::move(c));
  }
}

cplx ModalSignal::eigenvalue(std::size_t i) const {
  return {f_, kTwoPi * static_cast<double>(k_[i]) / period_};
}

void ModalSignal::check_time(double t) const { check_exponent(f_ * t, "modal signal"); }

cplx ModalSignal::operator()(double t) const {
  check_time(t);
  if (k_.empty()) return 0.0;
  if (step_ > 0) {
    // Horner in w = e^{i 2 pi step t / L}.
    const cplx w = harmonic_phase(step_, t, period_);
    cplx acc{};
    for (std::size_t i = b_.size(); i-- > 0;) acc = acc * w + b_[i];
    return acc * mode_exp(f_, k_.front(), t, period_);
  }
  cplx acc{};
  for (std::size_t i = 0; i < b_.size(); ++i) acc += b_[i] * harmonic_phase(k_[i], t, period_);
  return acc * std::exp(f_ * t);
}

std::vector<cplx> ModalSignal::sample(double t0, double dt, std::size_t count) const {
  std::vector<cplx> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = (*this)(t0 + dt * static_cast<double>(k));
  return out;
}

double ModalSignal::l2_norm_squared(double a, double b) const {
  require_window(a, b);
  check_exponent(2 * f_ * a, "window norm");
  check_exponent(2 * f_ * b, "window norm");
  const double len = b - a;
  const std::size_t n = b_.size();
  double total = 0;
  if (step_ > 0) {
    const auto& c = *autocorr_;
    const double ea = std::exp(2 * f_ * a), eb = std::exp(2 * f_ * b);
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t kj = static_cast<std::int64_t>(j) * step_;
      const cplx z{2 * f_, kTwoPi * static_cast<double>(kj) / period_};
      const cplx integral =
          exp_integral(z, ea * harmonic_phase(kj, a, period_), eb * harmonic_phase(kj, b, period_), len);
      total += (j == 0 ? 1.0 : 2.0) * (c[j] * integral).real();
    }
    return std::max(total, 0.0);
  }

  // Full double sum, Hermitian half: sum_n |b_n|^2 I_0 + 2 Re sum_{m > n} b_m conj(b_n) I_{mn}.
  std::vector<double> par(n), pai(n), pbr(n), pbi(n), mu(n);
  const double sa = std::exp(f_ * a), sb = std::exp(f_ * b);
  double diag = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx pa = b_[i] * sa * harmonic_phase(k_[i], a, period_);
    const cplx pb = b_[i] * sb * harmonic_phase(k_[i], b, period_);
    par[i] = pa.real();
    pai[i] = pa.imag();
    pbr[i] = pb.real();
    pbi[i] = pb.imag();
    mu[i] = kTwoPi * static_cast<double>(k_[i]) / period_;
    diag += std::norm(b_[i]);
  }
  const cplx z0{2 * f_, 0.0};
  total = diag * exp_integral(z0, std::exp(2 * f_ * a), std::exp(2 * f_ * b), len).real();

  const double d = 2 * f_;
  double min_gap = kInf;
  for (std::size_t i = 1; i < n; ++i) min_gap = std::min(min_gap, mu[i] - mu[i - 1]);
  const bool fast = (d * d + min_gap * min_gap) * len * len >= kSmallArgument * kSmallArgument;
  double off = 0;
  for (std::size_t m = 1; m < n; ++m) {
    const double bmr = pbr[m], bmi = pbi[m], amr = par[m], ami = pai[m], mum = mu[m];
    double acc = 0;
    if (fast) {
      for (std::size_t k = 0; k < m; ++k) {
        // w = P_m(b) conj(P_k(b)) - P_m(a) conj(P_k(a)); Re(w / z), z = d + i delta.
        const double wr = bmr * pbr[k] + bmi * pbi[k] - (amr * par[k] + ami * pai[k]);
        const double wi = bmi * pbr[k] - bmr * pbi[k] - (ami * par[k] - amr * pai[k]);
        const double delta = mum - mu[k];
        acc += (wr * d + wi * delta) / (d * d + delta * delta);
      }
    } else {
      for (std::size_t k = 0; k < m; ++k) {
        const cplx z{d, mum - mu[k]};
        const cplx wa = cplx{amr, ami} * cplx{par[k], -pai[k]};
        const cplx wb = cplx{bmr, bmi} * cplx{pbr[k], -pbi[k]};
        acc += exp_integral(z, wa, wb, len).real();
      }
    }
    off += acc;
  }
  total += 2 * off;
  return std::max(total, 0.0);
}

void ModalSignal::weighted_integrals(std::span<const cplx> s, double a, double b, std::span<cplx> out) const {
  require_window(a, b);
  if (out.size() != s.size()) throw DomainError("output size mismatch");
  check_time(a);
  check_time(b);
  const double len = b - a;
  const std::size_t n = b_.size();
  std::vector<cplx> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = b_[i] * mode_exp(f_, k_[i], a, period_);
    pb[i] = b_[i] * mode_exp(f_, k_[i], b, period_);
  }
  for (std::size_t t = 0; t < s.size(); ++t) {
    const cplx st = s[t];
    check_exponent(-st.real() * a, "weighted integral");
    check_exponent(-st.real() * b, "weighted integral");
    const double cycles = st.imag() * period_ / kTwoPi;
    const double kr = std::round(cycles);
    const bool commensurate = std::abs(cycles - kr) < 1e-9 && std::abs(kr) < 9e15;
    const std::int64_t ks = static_cast<std::int64_t>(kr);
    cplx ea, eb;
    if (commensurate) {
      ea = mode_exp(-st.real(), -ks, a, period_);
      eb = mode_exp(-st.real(), -ks, b, period_);
    } else {
      ea = cexp(-st * a);
      eb = cexp(-st * b);
    }
    const double d = f_ - st.real();
    cplx sum_b{}, sum_a{}, near{};
    for (std::size_t m = 0; m < n; ++m) {
      const double delta = commensurate ? kTwoPi * static_cast<double>(k_[m] - ks) / period_
                                        : kTwoPi * static_cast<double>(k_[m]) / period_ - st.imag();
      const double r2 = d * d + delta * delta;
      if (r2 * len * len < kSmallArgument * kSmallArgument) {
        const cplx z{d, delta};
        near += pa[m] * ea * len * exprel(z * len);
      } else {
        const cplx inv{d / r2, -delta / r2};
        sum_b += pb[m] * inv;
        sum_a += pa[m] * inv;
      }
    }
    out[t] = eb * sum_b - ea * sum_a + near;
  }
}

std::vector<cplx> ModalSignal::panel_cumulative(const GridSignal& g) const {
  const auto& y = g.samples();
  if (y.size() < 3 || y.size() % 2 == 0) throw DomainError("panel integration needs an odd sample count >= 3");
  const std::size_t panels = (y.size() - 1) / 2;
  const double h = g.dt();
  check_time(g.t_start());
  check_time(g.t_end());
  std::vector<cplx> inc(panels);
  if (step_ > 0) {
    // inc[p] = sum_k y_{2p+k} H_k(x_{2p}), H_k(t) = sum_m b_m h W_{m,k} e^{lambda_m t}, by Horner.
    const std::size_t n = b_.size();
    std::vector<cplx> c0(n), c1(n), c2(n);
    for (std::size_t m = 0; m < n; ++m) {
      const auto w = panel_weights(eigenvalue(m) * h, 0.0, 2.0);
      c0[m] = b_[m] * h * w[0];
      c1[m] = b_[m] * h * w[1];
      c2[m] = b_[m] * h * w[2];
    }
    for (std::size_t p = 0; p < panels; ++p) {
      const double t = g.time(2 * p);
      const cplx z = harmonic_phase(step_, t, period_);
      cplx h0{}, h1{}, h2{};
      for (std::size_t m = n; m-- > 0;) {
        h0 = h0 * z + c0[m];
        h1 = h1 * z + c1[m];
        h2 = h2 * z + c2[m];
      }
      inc[p] = mode_exp(f_, k_.front(), t, period_) * (h0 * y[2 * p] + h1 * y[2 * p + 1] + h2 * y[2 * p + 2]);
    }
  }
  for (std::size_t m = 0; m < b_.size() && step_ == 0; ++m) {
    const cplx lam = eigenvalue(m);
    const auto w = panel_weights(lam * h, 0.0, 2.0);
    const cplx advance = mode_exp(f_, k_[m], 2 * h, period_);
    const cplx bm = b_[m] * h;
    cplx factor{};
    for (std::size_t p = 0; p < panels; ++p) {
      if (p % kReanchor == 0) {
        factor = mode_exp(f_, k_[m], g.time(2 * p), period_);
      } else {
        factor *= advance;
      }
      inc[p] += bm * factor * (w[0] * y[2 * p] + w[1] * y[2 * p + 1] + w[2] * y[2 * p + 2]);
    }
  }
  std::vector<cplx> cum(panels + 1);
  for (std::size_t p = 0; p < panels; ++p) cum[p + 1] = cum[p] + inc[p];
  return cum;
}

cplx ModalSignal::panel_partial(const GridSignal& g, std::size_t node, double sigma) const {
  const auto& y = g.samples();
  if (node + 2 >= y.size()) throw DomainError("panel outside the sample range");
  const double h = g.dt();
  const double x = g.time(node);
  cplx acc{};
  for (std::size_t m = 0; m < b_.size(); ++m) {
    const auto w = panel_weights(eigenvalue(m) * h, 0.0, sigma);
    acc += b_[m] * mode_exp(f_, k_[m], x, period_) * (w[0] * y[node] + w[1] * y[node + 1] + w[2] * y[node + 2]);
  }
  return acc * h;
}

// ---------------------------------------------------------------- GridSignal

GridSignal::GridSignal(double t_start, double dt, std::vector<cplx> samples)
    : t0_(t_start), dt_(dt), y_(std::move(samples)) {
  if (!(dt_ > 0) || !std::isfinite(dt_)) throw DomainError("grid step must be positive");
  if (y_.size() < 2) throw DomainError("grid signal needs at least two samples");
}

namespace {

void require_inside(double a, double b, double t0, double t1) {
  const double tol = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t1)});
  if (a < t0 - tol || b > t1 + tol) {
    throw DomainError("window (" + format_double(a) + ", " + format_double(b) + ") outside signal domain [" +
                      format_double(t0) + ", " + format_double(t1) + "]");
  }
}

}  // namespace

double GridSignal::l2_norm_squared(double a, double b) const {
  require_window(a, b);
  require_inside(a, b, t0_, t_end());
  std::vector<double> e(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) e[i] = std::norm(y_[i]);
  return std::max(0.0, integrate_samples(UniformSamples<double>{t0_, dt_, e}, a, b));
}

cplx GridSignal::weighted_integral(cplx s, double a, double b) const {
  require_window(a, b);
  require_inside(a, b, t0_, t_end());
  return exp_weighted_integral(UniformSamples<cplx>{t0_, dt_, y_}, -s, a, b);
}

void GridSignal::write_csv(std::ostream& os) const {
  os << "t,re,im\n";
  for (std::size_t k = 0; k < y_.size(); ++k) {
    os << format_double(time(k)) << ',' << format_double(y_[k].real()) << ',' << format_double(y_[k].imag())
       << '\n';
  }
}

GridSignal GridSignal::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("empty signal file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,re,im") throw DomainError("signal CSV header must be 't,re,im'");
  std::vector<double> t;
  std::vector<cplx> y;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw DomainError("malformed signal row: " + line);
    }
    try {
      t.push_back(std::stod(a));
      y.emplace_back(std::stod(b), std::stod(c));
    } catch (const std::exception&) {
      throw DomainError("malformed signal row: " + line);
    }
  }
  if (t.size() < 2) throw DomainError("signal file needs at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double expect = t.front() + dt * static_cast<double>(k);
    if (std::abs(t[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw DomainError("signal samples are not uniformly spaced");
    }
  }
  return GridSignal(t.front(), dt, std::move(y));
}

// ---------------------------------------------------------------- disturbances

DisturbanceSpec DisturbanceSpec::noise(double level, std::uint64_t seed) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::MultiplicativeNoise;
  s.level = level;
  s.seed = seed;
  return s;
}

cplx DisturbanceSpec::operator()(double t) const {
  switch (kind) {
    case DisturbanceKind::None:
      return 0.0;
    case DisturbanceKind::WaveExample:
      return 2 * std::sin(1 / (1 + t)) + 3 * std::cos(10 * t);
    case DisturbanceKind::SchrodingerExample:
      return cplx{2 * std::sin(t / (10 + t)), 3 * std::cos(20 * t)};
    case DisturbanceKind::StringsExample:
      return std::sin(t * t / (10 + t)) + std::cos(10 * t);
    case DisturbanceKind::Custom: {
      cplx acc{};
      for (const auto& term : terms) {
        const double arg = term.omega * t + term.phase;
        cplx g;
        if (term.shape == "sin") {
          g = std::sin(arg);
        } else if (term.shape == "cos") {
          g = std::cos(arg);
        } else if (term.shape == "exp_i") {
          g = {std::cos(arg), std::sin(arg)};
        } else if (term.shape == "const") {
          g = 1.0;
        } else {
          throw ConfigError("unknown disturbance term shape '" + term.shape + "'");
        }
        acc += term.amplitude * g;
      }
      return acc;
    }
    case DisturbanceKind::MultiplicativeNoise:
      break;
  }
  throw DomainError("multiplicative noise has no closed form");
}

double DisturbanceSpec::sup_bound(double t0, double t1) const {
  if (bound) return *bound;
  if (!deterministic()) throw DomainError("multiplicative noise has no a priori bound");
  constexpr int kSamples = 100000;
  double m = 0;
  for (int k = 0; k < kSamples; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / (kSamples - 1);
    m = std::max(m, std::abs((*this)(t)));
  }
  return m;
}

namespace {

const std::vector<std::pair<DisturbanceKind, std::string>>& kind_names() {
  static const std::vector<std::pair<DisturbanceKind, std::string>> names{
      {DisturbanceKind::None, "none"},
      {DisturbanceKind::WaveExample, "wave_example"},
      {DisturbanceKind::SchrodingerExample, "schrodinger_example"},
      {DisturbanceKind::StringsExample, "strings_example"},
      {DisturbanceKind::Custom, "custom"},
      {DisturbanceKind::MultiplicativeNoise, "multiplicative_noise"}};
  return names;
}

}  // namespace

nlohmann::json DisturbanceSpec::to_json() const {
  nlohmann::json j;
  for (const auto& [k, name] : kind_names()) {
    if (k == kind) j["kind"] = name;
  }
  if (kind == DisturbanceKind::Custom) {
    j["terms"] = nlohmann::json::array();
    for (const auto& t : terms) {
      j["terms"].push_back({{"re", t.amplitude.real()},
                            {"im", t.amplitude.imag()},
                            {"shape", t.shape},
                            {"omega", t.omega},
                            {"phase", t.phase}});
    }
  }
  if (kind == DisturbanceKind::MultiplicativeNoise) {
    j["level"] = level;
    j["seed"] = seed;
  }
  if (bound) j["bound"] = *bound;
  return j;
}

DisturbanceSpec DisturbanceSpec::from_json(const nlohmann::json& j) {
  try {
    DisturbanceSpec s;
    const auto name = j.at("kind").get<std::string>();
    bool found = false;
    for (const auto& [k, n] : kind_names()) {
      if (n == name) {
        s.kind = k;
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown disturbance kind '" + name + "'");
    if (s.kind == DisturbanceKind::Custom) {
      for (const auto& t : j.at("terms")) {
        DisturbanceTerm term;
        term.amplitude = {t.value("re", 1.0), t.value("im", 0.0)};
        term.shape = t.value("shape", std::string("sin"));
        term.omega = t.value("omega", 0.0);
        term.phase = t.value("phase", 0.0);
        if (term.shape != "sin" && term.shape != "cos" && term.shape != "exp_i" && term.shape != "const") {
          throw ConfigError("unknown disturbance term shape '" + term.shape + "'");
        }
        s.terms.push_back(term);
      }
    }
    if (s.kind == DisturbanceKind::MultiplicativeNoise) {
      s.level = j.at("level").get<double>();
      s.seed = j.value("seed", std::uint64_t{0});
      if (!(s.level >= 0)) throw ConfigError("noise level must be non-negative");
    }
    if (j.contains("bound")) {
      s.bound = j.at("bound").get<double>();
      if (!(*s.bound >= 0)) throw ConfigError("disturbance bound must be non-negative");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed disturbance: ") + e.what());
  }
}

std::vector<cplx> noise_residual(std::span<const cplx> y, double level, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<cplx> out(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double u = static_cast<double>(gen() >> 11) * 0x1p-53;
    out[k] = level * (2 * u - 1) * y[k];
  }
  return out;
}

GridSignal apply_disturbance(const GridSignal& y, const DisturbanceSpec& spec) {
  std::vector<cplx> out = y.samples();
  if (spec.kind == DisturbanceKind::MultiplicativeNoise) {
    const auto r = noise_residual(out, spec.level, spec.seed);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += r[k];
  } else if (spec.kind != DisturbanceKind::None) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += spec(y.time(k));
  }
  return GridSignal(y.t_start(), y.dt(), std::move(out));
}

// ---------------------------------------------------------------- DisturbedSignal

DisturbedSignal::DisturbedSignal(ModalSignal clean, GridSignal residual) : clean_(std::move(clean)) {
  std::vector<cplx> conj(residual.samples().size());
  std::vector<double> energy(conj.size());
  for (std::size_t k = 0; k < conj.size(); ++k) {
    conj[k] = std::conj(residual.samples()[k]);
    energy[k] = std::norm(residual.samples()[k]);
  }
  GridSignal conj_grid(residual.t_start(), residual.dt(), std::move(conj));
  auto cum = clean_.panel_cumulative(conj_grid);
  cache_ = std::make_shared<const Cache>(Cache{std::move(residual), std::move(conj_grid), std::move(energy), std::move(cum)});
}

cplx DisturbedSignal::operator()(double t) const {
  const auto& r = cache_->residual;
  require_inside(t, t, r.t_start(), r.t_end());
  const double u = std::clamp((t - r.t_start()) / r.dt(), 0.0, static_cast<double>(r.samples().size() - 1));
  const std::size_t k = std::min(static_cast<std::size_t>(u), r.samples().size() - 2);
  const double w = u - static_cast<double>(k);
  return clean_(t) + (1 - w) * r.samples()[k] + w * r.samples()[k + 1];
}

cplx DisturbedSignal::cross_to(double x) const {
  const auto& g = cache_->conj_residual;
  const auto& cum = cache_->cumulative;
  const std::size_t panels = cum.size() - 1;
  const double u = (x - g.t_start()) / g.dt();
  std::size_t p = static_cast<std::size_t>(std::clamp(std::floor(u / 2), 0.0, static_cast<double>(panels - 1)));
  const double sigma = u - 2.0 * static_cast<double>(p);
  if (std::abs(sigma) < 1e-9) return cum[p];
  if (std::abs(sigma - 2.0) < 1e-9) return cum[p + 1];
  return cum[p] + clean_.panel_partial(g, 2 * p, sigma);
}

double DisturbedSignal::l2_norm_squared(double a, double b) const {
  require_window(a, b);
  const auto& r = cache_->residual;
  require_inside(a, b, r.t_start(), r.t_end());
  const double clean = clean_.l2_norm_squared(a, b);
  const double energy = integrate_samples(UniformSamples<double>{r.t_start(), r.dt(), cache_->energy}, a, b);
  const double cross = 2.0 * (cross_to(b) - cross_to(a)).real();
  return std::max(0.0, clean + energy + cross);
}

void DisturbedSignal::weighted_integrals(std::span<const cplx> s, double a, double b, std::span<cplx> out) const {
  const auto& r = cache_->residual;
  require_window(a, b);
  require_inside(a, b, r.t_start(), r.t_end());
  clean_.weighted_integrals(s, a, b, out);
  std::vector<cplx> neg(s.size()), extra(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
  exp_weighted_integrals(UniformSamples<cplx>{r.t_start(), r.dt(), r.samples()}, neg, a, b, extra);
  for (std::size_t i = 0; i < s.size(); ++i) out[i] += extra[i];
}

double default_residual_step(double period, double window) { return std::min(period, window) / 2048.0; }

DisturbedSignal make_disturbed(const ModalSignal& clean, const DisturbanceSpec& spec, double t0, double t1,
                               double max_step) {
  require_window(t0, t1);
  if (!(max_step > 0)) throw DomainError("residual step must be positive");
  auto intervals = static_cast<std::size_t>(std::ceil((t1 - t0) / max_step - 1e-9));
  intervals = std::max<std::size_t>(intervals, 2);
  if (intervals % 2 == 1) ++intervals;
  const double step = (t1 - t0) / static_cast<double>(intervals);
  std::vector<cplx> r(intervals + 1);
  if (spec.kind == DisturbanceKind::MultiplicativeNoise) {
    const auto y = clean.sample(t0, step, r.size());
    r = noise_residual(y, spec.level, spec.seed);
  } else if (spec.kind != DisturbanceKind::None) {
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = spec(t0 + step * static_cast<double>(k));
  }
  return DisturbedSignal(clean, GridSignal(t0, step, std::move(r)));
}

// ---------------------------------------------------------------- Signal dispatch

cplx synthesize(const ModalSignal& y, double t) { return y(t); }

cplx evaluate(const Signal& y, double t) {
  return std::visit(
      [t](const auto& s) -> cplx {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GridSignal>) {
          require_inside(t, t, s.t_start(), s.t_end());
          const double u = std::clamp((t - s.t_start()) / s.dt(), 0.0, static_cast<double>(s.samples().size() - 1));
          const std::size_t k = std::min(static_cast<std::size_t>(u), s.samples().size() - 2);
          const double w = u - static_cast<double>(k);
          return (1 - w) * s.samples()[k] + w * s.samples()[k + 1];
        } else {
          return s(t);
        }
      },
      y);
}

GridSignal sample_signal(const Signal& y, double t0, double t1, double dt) {
  require_window(t0, t1);
  if (!(dt > 0)) throw DomainError("sampling step must be positive");
  const auto count = static_cast<std::size_t>(std::llround((t1 - t0) / dt)) + 1;
  if (const auto* m = std::get_if<ModalSignal>(&y)) return GridSignal(t0, dt, m->sample(t0, dt, count));
  std::vector<cplx> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = evaluate(y, t0 + dt * static_cast<double>(k));
  return GridSignal(t0, dt, std::move(out));
}

double window_l2_norm(const Signal& y, double a, double b) {
  const double e = std::visit([&](const auto& s) { return s.l2_norm_squared(a, b); }, y);
  if (!std::isfinite(e)) throw OverflowError("window norm is not finite");
  return std::sqrt(std::max(0.0, e));
}

std::vector<cplx> weighted_exponential_integrals(const Signal& y, std::span<const cplx> lambda, double a, double b) {
  std::vector<cplx> out(lambda.size());
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GridSignal>) {
          for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = s.weighted_integral(lambda[i], a, b);
        } else {
          s.weighted_integrals(lambda, a, b, out);
        }
      },
      y);
  for (const auto& v : out) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("non-finite weighted integral");
  }
  return out;
}

cplx weighted_exponential_integral(const Signal& y, cplx lambda, double a, double b) {
  return weighted_exponential_integrals(y, std::span<const cplx>(&lambda, 1), a, b).front();
}

std::pair<double, double> signal_domain(const Signal& y) {
  if (const auto* g = std::get_if<GridSignal>(&y)) return {g->t_start(), g->t_end()};
  if (const auto* d = std::get_if<DisturbedSignal>(&y)) return {d->residual().t_start(), d->residual().t_end()};
  return {-kInf, kInf};
}

}  // namespace antidamp
