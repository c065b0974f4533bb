#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace antidamp {

using cplx = std::complex<double>;

/// Initial state of a testbed: (u0, u1) for second-order systems, u0 alone for
/// first-order ones. Compatibility with the boundary conditions is not
/// required; only finite energy is.
class InitialData {
 public:
  using Fn = std::function<cplx(double)>;

  /// u0, its derivative, and u1 as closed forms.
  static InitialData second_order(Fn u0, Fn du0, Fn u1, std::string label = "custom");
  static InitialData first_order(Fn u0, std::string label = "custom");
  /// Linear interpolation on increasing nodes; u0' is the slope of the interpolant
  /// (averaged across nodes).
  static InitialData sampled(std::vector<double> x, std::vector<cplx> u0, std::vector<cplx> u1 = {});

  cplx u0(double x) const { return u0_(x); }
  cplx du0(double x) const { return du0_ ? du0_(x) : cplx{}; }
  cplx u1(double x) const { return u1_ ? u1_(x) : cplx{}; }
  bool has_velocity() const { return static_cast<bool>(u1_); }
  const std::string& label() const { return label_; }
  /// JSON description the data was built from (empty for programmatic data).
  const nlohmann::json& source() const { return source_; }
  void set_source(nlohmann::json j) { source_ = std::move(j); }

 private:
  Fn u0_, du0_, u1_;
  std::string label_;
  nlohmann::json source_;
};

/// Registered closed-form profiles:
///   "zero"
///   "wave_sine"        u0 = A sin(pi x), u1 = B cos(pi x)   params {A, B}
///   "schrodinger_example"  u0 = sin(pi x) + i cos(pi x)
///   "strings_example"  u0 = sin x, u1 = cos x
InitialData closed_form_profile(const std::string& name, const nlohmann::json& params = nlohmann::json::object());
std::vector<std::string> registered_profiles();

/// {"kind": "closed_form", "name": ..., "params": {...}} or
/// {"kind": "sampled", "x": [...], "u0": [...], "u1": [...], "u0_im": [...], "u1_im": [...]}.
InitialData initial_data_from_json(const nlohmann::json& j);

}  // namespace antidamp
