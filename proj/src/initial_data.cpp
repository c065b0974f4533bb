#include "antidamp/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"

namespace antidamp {

InitialData InitialData::second_order(Fn u0, Fn du0, Fn u1, std::string label) {
  InitialData d;
  d.u0_ = std::move(u0);
  d.du0_ = std::move(du0);
  d.u1_ = std::move(u1);
  d.label_ = std::move(label);
  return d;
}

InitialData InitialData::first_order(Fn u0, std::string label) {
  InitialData d;
  d.u0_ = std::move(u0);
  d.label_ = std::move(label);
  return d;
}

namespace {

struct Table {
  std::vector<double> x;
  std::vector<cplx> y;

  std::size_t segment(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(i, x.size() - 2);
  }
  cplx value(double t) const {
    const std::size_t i = segment(t);
    const double w = (t - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * y[i] + w * y[i + 1];
  }
  cplx slope_of(std::size_t i) const { return (y[i + 1] - y[i]) / (x[i + 1] - x[i]); }
  cplx slope(double t) const {
    const std::size_t i = segment(t);
    const double tol = 1e-12 * (x[i + 1] - x[i]);
    if (std::abs(t - x[i]) < tol && i > 0) return 0.5 * (slope_of(i - 1) + slope_of(i));
    if (std::abs(t - x[i + 1]) < tol && i + 2 < x.size()) return 0.5 * (slope_of(i) + slope_of(i + 1));
    return slope_of(i);
  }
};

}  // namespace

InitialData InitialData::sampled(std::vector<double> x, std::vector<cplx> u0, std::vector<cplx> u1) {
  if (x.size() < 2 || u0.size() != x.size() || (!u1.empty() && u1.size() != x.size())) {
    throw DomainError("sampled initial data needs matching x/u0/u1 arrays with at least two nodes");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("sampled initial data nodes must be strictly increasing");
  }
  if (x.front() > 1e-12 || x.back() < 1.0 - 1e-12) throw DomainError("sampled initial data must cover [0, 1]");
  auto t0 = std::make_shared<Table>(Table{x, std::move(u0)});
  InitialData d;
  d.u0_ = [t0](double s) { return t0->value(s); };
  d.du0_ = [t0](double s) { return t0->slope(s); };
  if (!u1.empty()) {
    auto t1 = std::make_shared<Table>(Table{std::move(x), std::move(u1)});
    d.u1_ = [t1](double s) { return t1->value(s); };
  }
  d.label_ = "sampled";
  return d;
}

std::vector<std::string> registered_profiles() {
  return {"zero", "wave_sine", "schrodinger_example", "strings_example"};
}

InitialData closed_form_profile(const std::string& name, const nlohmann::json& params) {
  InitialData d;
  if (name == "zero") {
    auto z = [](double) { return cplx{}; };
    d = InitialData::second_order(z, z, z, name);
  } else if (name == "wave_sine") {
    const double a = params.value("A", 3.0);
    const double b = params.value("B", kPi);
    d = InitialData::second_order([a](double x) { return cplx{a * std::sin(kPi * x)}; },
                                  [a](double x) { return cplx{a * kPi * std::cos(kPi * x)}; },
                                  [b](double x) { return cplx{b * std::cos(kPi * x)}; }, name);
  } else if (name == "schrodinger_example") {
    d = InitialData::first_order([](double x) { return cplx{std::sin(kPi * x), std::cos(kPi * x)}; }, name);
  } else if (name == "strings_example") {
    d = InitialData::second_order([](double x) { return cplx{std::sin(x)}; },
                                  [](double x) { return cplx{std::cos(x)}; },
                                  [](double x) { return cplx{std::cos(x)}; }, name);
  } else {
    throw ConfigError("unknown initial-data profile '" + name + "'");
  }
  d.set_source({{"kind", "closed_form"}, {"name", name}, {"params", params}});
  return d;
}

namespace {

std::vector<cplx> complex_column(const nlohmann::json& j, const char* re_key, const char* im_key) {
  std::vector<cplx> out;
  if (!j.contains(re_key)) return out;
  const auto re = j.at(re_key).get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (j.contains(im_key)) im = j.at(im_key).get<std::vector<double>>();
  if (im.size() != re.size()) throw ConfigError(std::string("'") + im_key + "' length differs from '" + re_key + "'");
  out.reserve(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) out.emplace_back(re[i], im[i]);
  return out;
}

}  // namespace

InitialData initial_data_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "closed_form") {
      return closed_form_profile(j.at("name").get<std::string>(),
                                 j.contains("params") ? j.at("params") : nlohmann::json::object());
    }
    if (kind == "sampled") {
      auto d = InitialData::sampled(j.at("x").get<std::vector<double>>(), complex_column(j, "u0", "u0_im"),
                                    complex_column(j, "u1", "u1_im"));
      d.set_source(j);
      return d;
    }
    throw ConfigError("initial data kind must be 'closed_form' or 'sampled'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed initial data: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace antidamp
