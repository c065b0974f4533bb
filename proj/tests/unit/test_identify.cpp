#include <cmath>
#include <sstream>
#include <vector>

#include "antidamp/errors.hpp"
#include "antidamp/identify.hpp"
#include "antidamp/numeric.hpp"
#include "antidamp/systems.hpp"
#include "doctest.h"
#include "random_state.hpp"

using namespace antidamp;
using namespace antidamp::systems;
using doctest::Approx;

namespace {

ModalState unit_mode(IndexSet idx, std::int64_t n) {
  auto s = ModalState::zero(idx);
  s.coeffs[idx.position(n)] = 1.0;
  return s;
}

const char* kSystems[] = {"wave", "schrodinger", "strings"};

}  // namespace

TEST_SUITE("identify") {
  TEST_CASE("noise-free wave example recovers q") {
    WaveModel w({-kInf, -1});
    const auto d = closed_form_profile("wave_sine", {{"A", -3.0}, {"B", kPi}});
    const ModalSignal y(w, -3, w.project(-3, d, IndexSet::symmetric(500), {}));
    const auto rep = estimate_q(y, w, {2, 2.5});
    CHECK(std::abs(rep.q_hat + 3) < 1e-9);
    CHECK(rep.ratio == Approx(0.5).epsilon(1e-12));
    CHECK(rep.f_hat == Approx(-0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(rep.period == 2.0);
    CHECK_FALSE(rep.epsilon.has_value());
    const auto j = rep.to_json();
    CHECK(j.at("q_hat").get<double>() == rep.q_hat);
    CHECK(j.at("epsilon").is_null());
  }

  TEST_CASE("window validation") {
    WaveModel w({1, kInf});
    const ModalSignal y(w, 3, unit_mode(IndexSet::symmetric(2), 1));
    CHECK_THROWS_AS(estimate_q(y, w, {1.5, 3}), DomainError);
    CHECK_THROWS_AS(estimate_q(y, w, {3, 3}), DomainError);
    CHECK_THROWS_AS(estimate_q(y, w, {0, 3}), DomainError);
    const GridSignal g(0, 0.01, std::vector<cplx>(301, 1.0));
    CHECK_THROWS_AS(estimate_q(g, w, {2.5, 3.5}), DomainError);
    CHECK_NOTHROW(estimate_q(ModalSignal(w, 3, unit_mode(IndexSet::symmetric(2), 1)), w, {2, 4}));
  }

  TEST_CASE("a silent output carries no information") {
    WaveModel w({1, kInf});
    const ModalSignal zero(w, 3, ModalState::zero(IndexSet::symmetric(3)));
    CHECK_THROWS_AS(estimate_q(zero, w, {2, 3}), ZeroSignalError);
    const GridSignal g(0, 0.01, std::vector<cplx>(401, 0.0));
    CHECK_THROWS_AS(estimate_q(g, w, {2, 3}), ZeroSignalError);
  }

  TEST_CASE("single-mode Schrodinger ratio is exact") {
    SchrodingerModel s;
    const ModalSignal y(s, 0.7, unit_mode(IndexSet::natural(4), 1));
    for (double t1 : {2.55, 3.0, 7.1}) {
      const auto rep = estimate_q(y, s, {t1, t1 + 1});
      CHECK(std::abs(rep.q_hat - 0.7) < 1e-12);
    }
  }

  TEST_CASE("estimates outside the prior set report the raw growth rate") {
    WaveModel stable({-kInf, -1});
    WaveModel anti({1, kInf});
    const ModalSignal y(stable, -3, unit_mode(IndexSet::symmetric(2), 1));
    try {
      estimate_q(y, anti, {2, 3});
      FAIL("expected PriorSetError");
    } catch (const PriorSetError& e) {
      CHECK(e.f_hat() == Approx(-0.5 * std::log(2.0)).epsilon(1e-12));
      CHECK(e.q_raw() == Approx(-3).epsilon(1e-12));
    }
  }

  TEST_CASE("reconstruction of a single mode is a unit vector") {
    for (const char* sys : kSystems) {
      const double q = std::string(sys) == "schrodinger" ? 0.7 : 3;
      const auto model = make_model(sys, default_prior(sys, q));
      const auto idx = model->index_window(10);
      const std::int64_t m = idx.first + 3;
      const ModalSignal y(*model, q, unit_mode(idx, m));
      for (double t1 : {0.0, 1.3}) {
        const auto a = reconstruct_initial(y, *model, q, t1, idx);
        for (std::int64_t n = idx.first; n <= idx.last; ++n) CHECK(std::abs(a.at(n) - (n == m ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }

  TEST_CASE("constant disturbance contaminates every mode in closed form") {
    WaveModel w({1, kInf});
    const double q = 3, L = 2, T1 = 1.5;
    const cplx c{0.4, -0.2};
    const auto idx = IndexSet::symmetric(20);
    const DisturbedSignal y(ModalSignal(w, q, ModalState::zero(idx)), GridSignal(0, 1.0 / 512, std::vector<cplx>(2049, c)));
    const auto a = reconstruct_initial(y, w, q, T1, idx);
    for (std::int64_t n = idx.first; n <= idx.last; ++n) {
      const cplx lam = w.eigenvalue(q, n);
      const cplx want = c * (std::exp(-lam * T1) - std::exp(-lam * (T1 + L))) / (L * lam);
      CHECK(std::abs(a.at(n) - want) < 1e-13);
    }
  }

  TEST_CASE("reconstruction rejects degenerate observation coefficients and bad windows") {
    WaveModel w({1, kInf});
    const ModalSignal y(w, 3, unit_mode(IndexSet::symmetric(2), 1));
    CHECK_THROWS_AS(reconstruct_initial(y, w, 3, -1, IndexSet::symmetric(2)), DomainError);
    CHECK_THROWS_AS(reconstruct_initial(y, w, 0.5, 0, IndexSet::symmetric(2)), DomainError);
    const GridSignal g(0, 0.01, std::vector<cplx>(101, 1.0));
    CHECK_THROWS_AS(reconstruct_initial(g, w, 3, 0, IndexSet::symmetric(2)), DomainError);
  }

  TEST_CASE("estimation and reconstruction round trip on random states") {
    testsupport::Rng rng(21);
    for (const char* sys : kSystems) {
      for (int i = 0; i < 20; ++i) {
        const double q = testsupport::random_q(rng, sys);
        const auto model = make_model(sys, default_prior(sys, q));
        const auto n = rng.integer(5, std::string(sys) == "schrodinger" ? 40 : 100);
        const auto idx = model->index_window(n);
        const auto truth = testsupport::random_state(rng, idx);
        const ModalSignal y(*model, q, truth);
        const double L = model->period();
        const double t1 = rng.uniform(L, 2 * L);
        const auto rep = estimate_q(y, *model, {t1, t1 + rng.uniform(0.5, 3)});
        CHECK(std::abs(rep.q_hat - q) <= 1e-9 * std::abs(q));
        const auto a = reconstruct_initial(y, *model, rep.q_hat, rng.uniform(0, 2), idx);
        for (std::size_t k = 0; k < idx.size(); ++k) CHECK(std::abs(a.coeffs[k] - truth.coeffs[k]) < 1e-9);
      }
    }
  }

  TEST_CASE("scaling the output by a power of two leaves the estimate unchanged") {
    testsupport::Rng rng(22);
    WaveModel w({1, kInf});
    const auto st = testsupport::random_state(rng, IndexSet::symmetric(30));
    const ModalSignal y(w, 3, st);
    const auto g = sample_signal(y, 0, 4, 1.0 / 4096);
    auto scaled = g.samples();
    for (auto& v : scaled) v *= 8.0;
    const GridSignal g8(g.t_start(), g.dt(), scaled);
    const auto r1 = estimate_q(g, w, {2.2, 3.7});
    const auto r2 = estimate_q(g8, w, {2.2, 3.7});
    CHECK(r1.q_hat == r2.q_hat);
    CHECK(r1.ratio == r2.ratio);
  }

  TEST_CASE("disturbance diagnostics") {
    CHECK(error_bound_f(0, {0, 3}, 100, 2) == 0.0);
    const double want = (4.0 / 2) * 5 * std::sqrt(3.0) / (100 - 5 * std::sqrt(3.0));
    CHECK(error_bound_f(5, {1, 4}, 100, 2) == Approx(want).epsilon(1e-15));
    CHECK(error_bound_f(5, {1, 4}, 100, 2) == Approx(0.18963).epsilon(1e-4));
    CHECK_THROWS_AS(error_bound_f(5, {1, 4}, 5 * std::sqrt(3.0), 2), BoundUnavailable);
    const auto e = epsilon_snr(5, {2, 5}, 91.34);
    CHECK(e.epsilon == Approx(0.09481).epsilon(1e-4));
    CHECK(e.snr == Approx(1 / e.epsilon));
    const auto z = epsilon_snr(0, {2, 5}, 91.34);
    CHECK(z.epsilon == 0.0);
    CHECK(std::isinf(z.snr));
    CHECK_THROWS_AS(epsilon_snr(1, {2, 5}, 0), ZeroSignalError);
  }

  TEST_CASE("estimate reports the diagnostics when a bound is supplied") {
    WaveModel w({1, kInf});
    const auto d = closed_form_profile("wave_sine", {{"A", 3.0}, {"B", kPi}});
    const ModalSignal clean(w, 3, w.project(3, d, IndexSet::symmetric(200), {}));
    const auto y = make_disturbed(clean, DisturbanceSpec::wave_example(), 0, 13, 1.0 / 2048);
    const auto rep = estimate_q(y, w, {2, 5}, {5.0, std::nullopt});
    REQUIRE(rep.epsilon.has_value());
    CHECK(*rep.epsilon == Approx(5 * std::sqrt(3.0) / rep.norm_far));
    REQUIRE(rep.f_error_bound.has_value());
    CHECK(std::abs(rep.f_hat - w.growth().forward(3)) <= *rep.f_error_bound);
    const auto loud = estimate_q(y, w, {2, 5}, {1e4, std::nullopt});
    CHECK_FALSE(loud.f_error_bound.has_value());
    CHECK(loud.warnings.size() == 1);
    const auto late = estimate_q(y, w, {10, 13}, {5.0, std::nullopt});
    REQUIRE(late.f_error_bound.has_value());
    CHECK(std::abs(late.f_hat - w.growth().forward(3)) <= *late.f_error_bound);
  }

  TEST_CASE("Ingham constants") {
    const auto c = ingham_constants(kPi, 3);
    CHECK(std::abs(c.C1 - 10 / (3 * kPi)) < 1e-14);
    CHECK(std::abs(c.C2 - 104 / (3 * kPi)) < 1e-14);
    CHECK(c.gap_satisfied);
    CHECK(std::abs(ingham_constants(kPi, 4).C1 - 6 / kPi) < 1e-14);
    const auto edge = ingham_constants(kPi, 2);
    CHECK(std::abs(edge.C1) < 1e-15);
    CHECK_FALSE(edge.gap_satisfied);
    CHECK_THROWS_AS(ingham_constants(0, 3), DomainError);
  }

  TEST_CASE("Ingham lower bound on concrete states") {
    WaveModel w({1, kInf});
    const auto idx = IndexSet::symmetric(5);
    const auto eig = w.eigen(3, idx);
    const auto one = ingham_lower_bound_check(unit_mode(idx, 1), eig, {1, 4});
    CHECK(one.lhs == Approx(3).epsilon(1e-14));
    CHECK(one.rhs == Approx(10 / (3 * kPi)).epsilon(1e-14));
    CHECK(one.holds);
    const auto zero = ingham_lower_bound_check(ModalState::zero(idx), eig, {1, 4});
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.holds);
    CHECK_THROWS_AS(ingham_lower_bound_check(unit_mode(idx, 1), eig, {1, 2.5}), GapWindowError);
    testsupport::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
      const auto st = testsupport::random_state(rng, idx, rng.uniform(0, 3));
      CHECK(ingham_lower_bound_check(st, eig, {0.5, 3.5}).holds);
    }
  }

  TEST_CASE("profiles and distances") {
    const ModalState a({-1, 1}, {1.0, 0.0, cplx{0, 2}});
    const ModalState b({0, 2}, {0.0, 0.0, 3.0});
    CHECK(modal_l2_distance(a, b) == Approx(std::sqrt(1 + 4 + 9.0)));
    CHECK(modal_l2_distance(a, a) == 0.0);
    SchrodingerModel s;
    const auto p = synthesize_profile(s, 0.7, unit_mode(IndexSet::natural(3), 2), 11);
    CHECK(p.x.size() == 11);
    CHECK(p.u1.empty());
    CHECK(p.u0[0].real() == Approx(std::sqrt(2.0)));
    Profile flat{{0, 0.5, 1}, {1.0, 1.0, 1.0}, {}};
    Profile off{{0, 0.5, 1}, {0.0, 0.0, 0.0}, {}};
    CHECK(profile_l2_error(flat, off).u0 == Approx(1.0));
    CHECK_FALSE(profile_l2_error(flat, off).u1.has_value());
    std::ostringstream os;
    write_profile_csv(os, flat);
    CHECK(os.str().rfind("x,re_u0,im_u0\n0,1,0\n", 0) == 0);
  }
}
