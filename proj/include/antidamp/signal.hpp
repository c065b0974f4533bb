#pragma once

// Boundary output y(t): exact modal sums, uniformly sampled grids, and modal
// sums with an additive residual (deterministic disturbance or sampled noise).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "antidamp/core.hpp"
#include "json.hpp"

namespace antidamp {

class GridSignal;

/// y_e(t) = sum_n b_n e^{lambda_n t}, b_n = a_n kappa_n, lambda_n = f + i 2 pi K_n / L.
class ModalSignal {
 public:
  ModalSignal(const SpectralModel& model, double q, const ModalState& state);
  /// Raw construction; harmonics must be strictly increasing.
  ModalSignal(double growth, double period, std::vector<std::int64_t> harmonic, std::vector<cplx> weight);

  double growth() const { return f_; }
  double period() const { return period_; }
  std::size_t size() const { return k_.size(); }
  const std::vector<std::int64_t>& harmonics() const { return k_; }
  const std::vector<cplx>& weights() const { return b_; }
  cplx eigenvalue(std::size_t i) const;
  /// Harmonics form K_0 + j * step (wave, strings).
  bool arithmetic() const { return step_ > 0; }

  cplx operator()(double t) const;
  /// Values on t0 + k dt, k = 0 .. count-1.
  std::vector<cplx> sample(double t0, double dt, std::size_t count) const;
  double l2_norm_squared(double a, double b) const;
  /// out[i] = int_a^b y(t) e^{-s[i] t} dt.
  void weighted_integrals(std::span<const cplx> s, double a, double b, std::span<cplx> out) const;
  /// G[p] = sum_m b_m int_{t0}^{x_{2p}} g(t) e^{lambda_m t} dt at the panel nodes of g
  /// (odd sample count required).
  std::vector<cplx> panel_cumulative(const GridSignal& g) const;
  /// sum_m b_m int over [x_node, x_node + sigma dt] of the panel interpolant of g times e^{lambda_m t}.
  cplx panel_partial(const GridSignal& g, std::size_t node, double sigma) const;

 private:
  void check_time(double t) const;
  void build_autocorrelation() const;

  double f_;
  double period_;
  std::vector<std::int64_t> k_;
  std::vector<cplx> b_;
  std::int64_t step_ = 0;
  mutable std::shared_ptr<const std::vector<cplx>> autocorr_;
};

/// Samples y(t_start + k dt), k = 0 .. n-1.
class GridSignal {
 public:
  GridSignal(double t_start, double dt, std::vector<cplx> samples);

  double t_start() const { return t0_; }
  double t_end() const { return t0_ + dt_ * static_cast<double>(y_.size() - 1); }
  double dt() const { return dt_; }
  const std::vector<cplx>& samples() const { return y_; }
  double time(std::size_t k) const { return t0_ + dt_ * static_cast<double>(k); }

  double l2_norm_squared(double a, double b) const;
  cplx weighted_integral(cplx s, double a, double b) const;

  /// CSV with header t,re,im at 17 significant digits.
  void write_csv(std::ostream& os) const;
  static GridSignal read_csv(std::istream& is);

 private:
  double t0_, dt_;
  std::vector<cplx> y_;
};

enum class DisturbanceKind { None, WaveExample, SchrodingerExample, StringsExample, Custom, MultiplicativeNoise };

/// One term c * g(omega t + phase), g in {sin, cos, exp_i, const}.
struct DisturbanceTerm {
  cplx amplitude = 1.0;
  std::string shape = "sin";
  double omega = 0;
  double phase = 0;
};

struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::None;
  std::vector<DisturbanceTerm> terms;  // Custom
  double level = 0;                    // MultiplicativeNoise
  std::uint64_t seed = 0;
  std::optional<double> bound;  // M; estimated by sampling when absent

  bool deterministic() const { return kind != DisturbanceKind::MultiplicativeNoise; }
  bool is_none() const { return kind == DisturbanceKind::None || (kind == DisturbanceKind::MultiplicativeNoise && level == 0); }
  /// d(t) for deterministic kinds.
  cplx operator()(double t) const;
  /// Supplied bound, or max |d| over 1e5 uniform samples of [t0, t1].
  double sup_bound(double t0, double t1) const;

  static DisturbanceSpec of(DisturbanceKind k) {
    DisturbanceSpec s;
    s.kind = k;
    return s;
  }
  static DisturbanceSpec none() { return {}; }
  static DisturbanceSpec wave_example() { return of(DisturbanceKind::WaveExample); }
  static DisturbanceSpec schrodinger_example() { return of(DisturbanceKind::SchrodingerExample); }
  static DisturbanceSpec strings_example() { return of(DisturbanceKind::StringsExample); }
  static DisturbanceSpec noise(double level, std::uint64_t seed);

  nlohmann::json to_json() const;
  static DisturbanceSpec from_json(const nlohmann::json& j);
};

/// y_e + r: exact modal part plus a residual sampled on a uniform grid with an
/// odd number of samples. Cross terms between the two are integrated with the
/// panel interpolant of r against each exact exponential.
class DisturbedSignal {
 public:
  DisturbedSignal(ModalSignal clean, GridSignal residual);

  const ModalSignal& clean() const { return clean_; }
  const GridSignal& residual() const { return cache_->residual; }
  cplx operator()(double t) const;
  double l2_norm_squared(double a, double b) const;
  void weighted_integrals(std::span<const cplx> s, double a, double b, std::span<cplx> out) const;

 private:
  struct Cache {
    GridSignal residual;
    GridSignal conj_residual;
    std::vector<double> energy;      // |r|^2
    std::vector<cplx> cumulative;   // panel_cumulative of conj(r)
  };
  cplx cross_to(double x) const;

  ModalSignal clean_;
  std::shared_ptr<const Cache> cache_;
};

using Signal = std::variant<ModalSignal, GridSignal, DisturbedSignal>;

/// Default residual step: min(L, window) / 2048.
double default_residual_step(double period, double window);

/// Samples the residual of `spec` on [t0, t1] (odd sample count, step <= max_step)
/// and attaches it to `clean`. Noise residuals are rho xi_k y_e(t_k).
DisturbedSignal make_disturbed(const ModalSignal& clean, const DisturbanceSpec& spec, double t0, double t1,
                               double max_step);

cplx synthesize(const ModalSignal& y, double t);
cplx evaluate(const Signal& y, double t);
GridSignal sample_signal(const Signal& y, double t0, double t1, double dt);

/// Deterministic kinds add d(t_k); noise returns y_k (1 + rho xi_k), xi_k ~ U[-1, 1].
GridSignal apply_disturbance(const GridSignal& y, const DisturbanceSpec& spec);
/// rho xi_k y_k; the part apply_disturbance adds for noise specs.
std::vector<cplx> noise_residual(std::span<const cplx> y, double level, std::uint64_t seed);

double window_l2_norm(const Signal& y, double a, double b);
cplx weighted_exponential_integral(const Signal& y, cplx lambda, double a, double b);
std::vector<cplx> weighted_exponential_integrals(const Signal& y, std::span<const cplx> lambda, double a, double b);

/// Time domain [t0, t1] of a signal; modal signals return (-inf, inf).
std::pair<double, double> signal_domain(const Signal& y);

}  // namespace antidamp
