#pragma once

// Estimators: q from the ratio of output norms over two windows one period
// apart, the initial state from modal integrals over one period, and the
// disturbance-case diagnostics.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "antidamp/core.hpp"
#include "antidamp/initial_data.hpp"
#include "antidamp/signal.hpp"
#include "json.hpp"

namespace antidamp {

/// Near window (T1, T2); the far window is (T1 - L, T2 - L).
struct WindowSpec {
  double T1 = 0;
  double T2 = 0;
};

struct EstimationOptions {
  /// Disturbance bound M; enables epsilon and the f-error bound.
  std::optional<double> disturbance_bound;
  /// ||y_e|| on the far window when the clean signal is known; epsilon falls
  /// back to the measured far norm otherwise.
  std::optional<double> clean_far_norm;
};

struct EstimationReport {
  double q_hat = 0;
  double f_hat = 0;
  double ratio = 0;
  double norm_near = 0;
  double norm_far = 0;
  double period = 0;
  WindowSpec window;
  std::optional<double> epsilon;
  std::optional<double> snr;
  std::optional<double> f_error_bound;
  std::optional<ModalState> reconstruction;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Throws DomainError for an invalid window, ZeroSignalError when the far
/// window is (numerically) empty, PriorSetError when f_hat maps outside Q.
EstimationReport estimate_q(const Signal& y, const SpectralModel& model, WindowSpec window,
                            const EstimationOptions& opts = {});

/// a_n = (1 / (L kappa_n)) int_{T1}^{T1+L} y(t) e^{-lambda_n t} dt, lambda_n at q_hat.
ModalState reconstruct_initial(const Signal& y, const SpectralModel& model, double q_hat, double T1,
                               IndexSet indices);

/// l2 distance between two coefficient sequences over the union of their index sets.
double modal_l2_distance(const ModalState& a, const ModalState& b);

/// Spatial samples of a state on a uniform x-grid over [0, 1].
struct Profile {
  std::vector<double> x;
  std::vector<cplx> u0;
  std::vector<cplx> u1;  // empty for first-order systems
};

struct ProfileError {
  double u0 = 0;
  std::optional<double> u1;
};

/// sum_n a_n Phi_n(x) at `points` uniform nodes.
Profile synthesize_profile(const SpectralModel& model, double q, const ModalState& state, std::size_t points = 101);
Profile sample_profile(const InitialData& data, bool second_order, std::size_t points = 101);
/// Trapezoid L2(0, 1) norm of the difference on the shared grid.
ProfileError profile_l2_error(const Profile& estimate, const Profile& truth);
/// CSV x,re_u0,im_u0[,re_u1,im_u1].
void write_profile_csv(std::ostream& os, const Profile& p);

/// (4 / L) M sqrt(T2 - T1) / (norm_far - M sqrt(T2 - T1)); BoundUnavailable
/// when the denominator is not positive.
double error_bound_f(double M, WindowSpec window, double norm_far, double period);

struct SnrReport {
  double epsilon = 0;
  double snr = 0;  // 1 / epsilon, +inf when epsilon = 0
};
SnrReport epsilon_snr(double M, WindowSpec window, double norm);

struct InghamConstants {
  double gamma = 0;
  double T = 0;
  double C1 = 0;
  double C2 = 0;
  bool gap_satisfied = false;  // T > 2 pi / gamma
};
InghamConstants ingham_constants(double gamma, double T);

struct InghamCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};
/// lhs = int_{T1}^{T2} |sum a_n e^{i mu_n t}|^2 dt (exact), rhs = C1 sum |a_n|^2.
/// Throws GapWindowError when T2 - T1 <= 2 pi / gamma.
InghamCheck ingham_lower_bound_check(const ModalState& state, const EigenStructure& eigen, WindowSpec window);

}  // namespace antidamp
