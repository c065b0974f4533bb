#pragma once

// The three testbeds: anti-stable wave equation with boundary anti-damping,
// anti-damped Schrodinger equation, and two strings coupled through a
// joint anti-damper at x = 1/2.

#include <memory>
#include <string>

#include "antidamp/core.hpp"
#include "antidamp/initial_data.hpp"

namespace antidamp::systems {

inline constexpr double kDefaultSingularMargin = 1e-9;

/// u_tt = u_xx, u(0) = 0, u_x(1) = q u_t(1), y = u_x(0).
class WaveModel final : public SpectralModel {
 public:
  enum class Branch { AntiStable, Intermediate, Stable };  // q > 1, 0 < q < 1, q < -1

  explicit WaveModel(PriorSet prior, double singular_margin = kDefaultSingularMargin);

  Branch branch() const { return branch_; }
  std::string_view name() const override { return "wave"; }
  /// 2, or 4 on the 0 < q < 1 branch where mu_n = (2n+1) pi / 2.
  double period() const override;
  IndexSet index_window(std::int64_t n) const override { return IndexSet::symmetric(n); }
  double frequency(std::int64_t n) const override;
  std::int64_t harmonic(std::int64_t n) const override;
  int state_dim() const override { return 2; }
  cplx observation(double, std::int64_t) const override { return 1.0; }
  std::pair<double, double> kappa_bounds(double) const override { return {1.0, 1.0}; }
  /// (sinh(lambda x) / lambda, sinh(lambda x)).
  StateValue eigenfunction(double q, std::int64_t n, double x) const override;
  ModalState project(double q, const InitialData& data, IndexSet indices,
                     const ProjectionOptions& opts) const override;
  std::vector<double> singular_points() const override { return {-1.0, 1.0}; }

 private:
  Branch branch_;
};

/// u_t = -i u_xx + q u, u_x(0) = u(1) = 0, y = u(0).
class SchrodingerModel final : public SpectralModel {
 public:
  explicit SchrodingerModel(PriorSet prior = {0.0, kInf, false, false});

  std::string_view name() const override { return "schrodinger"; }
  double period() const override;  // 8 / pi
  IndexSet index_window(std::int64_t n) const override { return IndexSet::natural(n); }
  double frequency(std::int64_t n) const override;
  std::int64_t harmonic(std::int64_t n) const override;  // (2n - 1)^2
  int state_dim() const override { return 1; }
  cplx observation(double, std::int64_t) const override;
  std::pair<double, double> kappa_bounds(double) const override;
  /// sqrt(2) cos((n - 1/2) pi x).
  StateValue eigenfunction(double q, std::int64_t n, double x) const override;
  ModalState project(double q, const InitialData& data, IndexSet indices,
                     const ProjectionOptions& opts) const override;
};

/// Two strings on (0, 1/2) and (1/2, 1) joined with u_x(1/2-) - u_x(1/2+) = q u_t(1/2),
/// u(0) = u_x(1) = 0, y = u_x(0). Prior set inside (2, inf).
class StringsModel final : public SpectralModel {
 public:
  explicit StringsModel(PriorSet prior = {2.0, kInf, false, false},
                        double singular_margin = kDefaultSingularMargin);

  std::string_view name() const override { return "strings"; }
  double period() const override { return 2.0; }
  IndexSet index_window(std::int64_t n) const override { return IndexSet::symmetric(n); }
  double frequency(std::int64_t n) const override;
  std::int64_t harmonic(std::int64_t n) const override { return n; }
  int state_dim() const override { return 2; }
  /// sqrt(2) cosh(lambda_n / 2).
  cplx observation(double q, std::int64_t n) const override;
  std::pair<double, double> kappa_bounds(double q) const override;
  /// (phi_n, lambda_n phi_n); the left formula is used at x = 1/2.
  StateValue eigenfunction(double q, std::int64_t n, double x) const override;
  ModalState project(double q, const InitialData& data, IndexSet indices,
                     const ProjectionOptions& opts) const override;
  std::vector<double> singular_points() const override { return {2.0}; }
};

/// Prior set used when a configuration names only the system and the true q:
/// the branch interval containing q.
PriorSet default_prior(const std::string& system, double q);

std::unique_ptr<SpectralModel> make_model(const std::string& system, const PriorSet& prior);

}  // namespace antidamp::systems

namespace antidamp {

/// a_n = <X(0), Psi_n> over `indices`.
ModalState project_initial(const SpectralModel& model, double q, const InitialData& data, IndexSet indices,
                           const ProjectionOptions& opts = {});

StateValue evaluate_eigenfunction(const SpectralModel& model, double q, std::int64_t n, double x);

cplx observation_coefficient(const SpectralModel& model, double q, std::int64_t n);

}  // namespace antidamp
