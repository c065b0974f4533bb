#pragma once

// Abstract contract for Riesz-spectral systems whose eigenvalues share a common
// real part f(q) and whose frequencies are commensurate with a period L.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace antidamp {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval of admissible parameter values; either end may be infinite.
struct PriorSet {
  double lower = -kInf;
  double upper = kInf;
  bool lower_closed = false;
  bool upper_closed = false;

  bool contains(double q) const;
  /// `count` points strictly inside the interval, increasing.
  std::vector<double> interior_samples(std::size_t count) const;
  std::string describe() const;
};

/// q <-> f(q), the common real part of the spectrum.
class GrowthMap {
 public:
  using Fn = std::function<double(double)>;

  GrowthMap(Fn forward, Fn inverse, PriorSet prior, Fn inverse_from_ratio = {});

  double forward(double q) const { return forward_(q); }
  double inverse(double f) const { return inverse_(f); }
  /// q recovered from r = e^{f L}. Uses the closed form when one was supplied,
  /// otherwise inverse(ln(r) / period).
  double inverse_from_ratio(double r, double period) const;
  const PriorSet& prior() const { return prior_; }

  /// Round trip and strict monotonicity, checked on `samples` interior points.
  /// Throws DomainError on failure.
  void validate(std::size_t samples = 1000, double rel_tol = 1e-12) const;

 private:
  Fn forward_;
  Fn inverse_;
  PriorSet prior_;
  Fn inverse_from_ratio_;
};

/// Contiguous window of mode indices [first, last].
struct IndexSet {
  std::int64_t first = 0;
  std::int64_t last = -1;

  static IndexSet symmetric(std::int64_t n) { return {-n, n}; }
  static IndexSet natural(std::int64_t n) { return {1, n}; }

  std::size_t size() const { return last < first ? 0 : static_cast<std::size_t>(last - first + 1); }
  bool empty() const { return size() == 0; }
  bool contains(std::int64_t n) const { return n >= first && n <= last; }
  std::int64_t at(std::size_t pos) const { return first + static_cast<std::int64_t>(pos); }
  std::size_t position(std::int64_t n) const { return static_cast<std::size_t>(n - first); }
  bool operator==(const IndexSet&) const = default;
};

/// Modal coefficients a_n = <x0, psi_n>; zero outside `indices`.
struct ModalState {
  IndexSet indices;
  std::vector<cplx> coeffs;

  ModalState() = default;
  ModalState(IndexSet idx, std::vector<cplx> c);
  static ModalState zero(IndexSet idx) { return {idx, std::vector<cplx>(idx.size())}; }

  cplx at(std::int64_t n) const { return indices.contains(n) ? coeffs[indices.position(n)] : cplx{}; }
  double l2_norm() const;
};

/// Spectral data for one parameter value over a truncated index window.
struct EigenStructure {
  double period = 0;  // L
  IndexSet indices;
  std::vector<double> mu;            // mu_n, by position
  std::vector<std::int64_t> harmonic;  // K_n with mu_n = 2 pi K_n / L
  std::vector<cplx> kappa;           // observation coefficients
  double kappa_min = 0;
  double kappa_max = 0;

  /// Build from raw frequencies; K_n is the nearest integer to mu_n L / (2 pi).
  static EigenStructure from_frequencies(double period, IndexSet indices, std::vector<double> mu,
                                         std::vector<cplx> kappa = {});
};

struct GapReport {
  double max_integer_deviation = 0;
  double min_gap = kInf;
};

/// Point value of an eigenfunction or a state: (u, v) for second-order
/// systems, u alone (v = 0) for first-order ones.
struct StateValue {
  cplx u{};
  cplx v{};
};

class InitialData;

struct ProjectionOptions {
  std::size_t quadrature_points = 4097;
};

class SpectralModel {
 public:
  SpectralModel(GrowthMap growth, double singular_margin);
  virtual ~SpectralModel() = default;

  virtual std::string_view name() const = 0;
  virtual double period() const = 0;
  /// Index window for truncation level n: [-n, n] or [1, n].
  virtual IndexSet index_window(std::int64_t n) const = 0;
  virtual double frequency(std::int64_t n) const = 0;
  virtual std::int64_t harmonic(std::int64_t n) const = 0;
  /// Number of state components (2 for (u, u_t) systems, 1 otherwise).
  virtual int state_dim() const = 0;
  virtual cplx observation(double q, std::int64_t n) const = 0;
  virtual std::pair<double, double> kappa_bounds(double q) const = 0;
  /// Phi_n(x) for x in [0, 1].
  virtual StateValue eigenfunction(double q, std::int64_t n, double x) const = 0;
  /// a_n = <X(0), Psi_n> in the state-space inner product.
  virtual ModalState project(double q, const InitialData& data, IndexSet indices,
                             const ProjectionOptions& opts) const = 0;
  /// Parameter values where the spectrum degenerates.
  virtual std::vector<double> singular_points() const { return {}; }

  const GrowthMap& growth() const { return growth_; }
  double singular_margin() const { return singular_margin_; }

  /// Throws SingularParameterError near a singular point, DomainError outside the prior set.
  void check_parameter(double q) const;
  cplx eigenvalue(double q, std::int64_t n) const;
  EigenStructure eigen(double q, IndexSet indices) const;

 private:
  GrowthMap growth_;
  double singular_margin_;
};

/// lambda_n = f(q) + i mu_n.
cplx eigenvalue(const SpectralModel& model, double q, std::int64_t n);

GapReport check_gap_condition(const EigenStructure& eigen);

}  // namespace antidamp
