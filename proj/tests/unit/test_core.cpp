#include <cmath>

#include "antidamp/core.hpp"
#include "antidamp/errors.hpp"
#include "antidamp/numeric.hpp"
#include "antidamp/systems.hpp"
#include "doctest.h"
#include "random_state.hpp"

using namespace antidamp;
using doctest::Approx;

TEST_SUITE("core") {
  TEST_CASE("prior set membership and interior samples") {
    PriorSet p{1.0, kInf, false, false};
    CHECK(p.contains(1.5));
    CHECK_FALSE(p.contains(1.0));
    PriorSet closed{0.0, 2.0, true, true};
    CHECK(closed.contains(0.0));
    CHECK(closed.contains(2.0));
    for (const auto& prior : {p, PriorSet{-kInf, -1.0}, PriorSet{0.0, 1.0}, PriorSet{-kInf, kInf}}) {
      const auto xs = prior.interior_samples(200);
      REQUIRE(xs.size() == 200);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(std::isfinite(xs[i]));
        CHECK(prior.contains(xs[i]));
        if (i > 0) CHECK(xs[i] > xs[i - 1]);
      }
    }
  }

  TEST_CASE("growth map round trip on 100 random q per system") {
    testsupport::Rng rng(11);
    for (const std::string sys : {"wave", "schrodinger", "strings"}) {
      for (int k = 0; k < 100; ++k) {
        const double q = testsupport::random_q(rng, sys);
        const auto model = systems::make_model(sys, systems::default_prior(sys, q));
        const double back = model->growth().inverse(model->growth().forward(q));
        CHECK(std::abs(back - q) <= 1e-12 * std::abs(q));
      }
    }
    systems::WaveModel mid(PriorSet{0.0, 1.0});
    testsupport::Rng r2(12);
    for (int k = 0; k < 100; ++k) {
      const double q = r2.uniform(0.05, 0.95);
      CHECK(std::abs(mid.growth().inverse(mid.growth().forward(q)) - q) <= 1e-12 * q);
    }
  }

  TEST_CASE("growth map validation rejects non-monotone maps") {
    GrowthMap bad([](double q) { return q * q; }, [](double f) { return std::sqrt(f); }, PriorSet{-1.0, 1.0});
    CHECK_THROWS_AS(bad.validate(), DomainError);
    GrowthMap good([](double q) { return 2 * q; }, [](double f) { return f / 2; }, PriorSet{-1.0, 1.0});
    CHECK_NOTHROW(good.validate());
  }

  TEST_CASE("eigenvalue closed forms") {
    systems::WaveModel wave(PriorSet{1.0, kInf});
    const cplx w = eigenvalue(wave, 3.0, 1);
    CHECK(w.real() == Approx(0.5 * std::log(2.0)).epsilon(1e-15));
    CHECK(w.imag() == Approx(kPi).epsilon(1e-15));
    CHECK(w.real() == Approx(0.346574).epsilon(1e-6));

    systems::SchrodingerModel schr;
    const cplx s = eigenvalue(schr, 0.7, 1);
    CHECK(s.real() == Approx(0.7));
    CHECK(s.imag() == Approx(kPi * kPi / 4).epsilon(1e-15));

    systems::StringsModel str;
    const cplx z = eigenvalue(str, 3.0, 0);
    CHECK(z.real() == Approx(0.5 * std::log(5.0)).epsilon(1e-15));
    CHECK(z.real() == Approx(0.804719).epsilon(1e-6));
    CHECK(z.imag() == 0.0);
  }

  TEST_CASE("eigenvalue rejects singular and out-of-prior parameters") {
    systems::WaveModel wave(PriorSet{1.0, kInf});
    CHECK_THROWS_AS(wave.eigenvalue(1.0, 1), SingularParameterError);
    CHECK_THROWS_AS(wave.eigenvalue(1.0 + 1e-10, 1), SingularParameterError);
    CHECK_THROWS_AS(wave.eigenvalue(0.5, 1), DomainError);
    CHECK_THROWS_AS(wave.eigenvalue(-3.0, 1), DomainError);
    systems::StringsModel str;
    CHECK_THROWS_AS(str.eigenvalue(2.0, 1), SingularParameterError);
    systems::SchrodingerModel schr;
    CHECK_THROWS_AS(schr.eigenvalue(-0.1, 1), DomainError);
  }

  TEST_CASE("wave prior straddling two branches is rejected") {
    CHECK_THROWS_AS(systems::WaveModel(PriorSet{-2.0, 2.0}), DomainError);
    CHECK_THROWS_AS(systems::WaveModel(PriorSet{0.5, 3.0}), DomainError);
  }

  TEST_CASE("gap condition report") {
    systems::WaveModel wave(PriorSet{1.0, kInf});
    const auto gw = check_gap_condition(wave.eigen(3.0, IndexSet::symmetric(50)));
    CHECK(gw.max_integer_deviation < 1e-12);
    CHECK(gw.min_gap == Approx(kPi).epsilon(1e-14));

    systems::SchrodingerModel schr;
    const auto gs = check_gap_condition(schr.eigen(0.7, IndexSet::natural(200)));
    CHECK(gs.max_integer_deviation < 1e-12 * 399.0 * 399.0);
    CHECK(gs.min_gap == Approx(2 * kPi * kPi).epsilon(1e-14));

    std::vector<double> mu;
    for (int n = -5; n <= 5; ++n) mu.push_back(n * kPi + 0.01);
    const auto e = EigenStructure::from_frequencies(2.0, IndexSet::symmetric(5), mu);
    CHECK(check_gap_condition(e).max_integer_deviation == Approx(0.01 / kPi).epsilon(1e-9));
    CHECK(check_gap_condition(e).max_integer_deviation == Approx(0.003183).epsilon(1e-4));
  }

  TEST_CASE("harmonic integers are exact for the built-in systems") {
    testsupport::Rng rng(5);
    for (const std::string sys : {"wave", "schrodinger", "strings"}) {
      const double q = testsupport::random_q(rng, sys);
      const auto m = systems::make_model(sys, systems::default_prior(sys, q));
      const auto e = m->eigen(q, m->index_window(500));
      for (std::size_t i = 0; i < e.mu.size(); ++i) {
        const double x = e.mu[i] * e.period / kTwoPi;
        CHECK(std::abs(x - static_cast<double>(e.harmonic[i])) < 1e-12 * std::max(1.0, std::abs(x)));
        if (i > 0) CHECK(e.mu[i] > e.mu[i - 1]);
      }
    }
  }

  TEST_CASE("real part of the spectrum is independent of n") {
    testsupport::Rng rng(6);
    for (const std::string sys : {"wave", "schrodinger", "strings"}) {
      const double q = testsupport::random_q(rng, sys);
      const auto m = systems::make_model(sys, systems::default_prior(sys, q));
      const double f = m->growth().forward(q);
      const auto idx = m->index_window(1000);
      double worst = 0;
      for (std::int64_t n = idx.first; n <= idx.last; ++n) worst = std::max(worst, std::abs(m->eigenvalue(q, n).real() - f));
      CHECK(worst < 1e-14);
    }
  }

  TEST_CASE("index sets and modal states") {
    const auto s = IndexSet::symmetric(3);
    CHECK(s.size() == 7);
    CHECK(s.at(0) == -3);
    CHECK(s.position(3) == 6);
    CHECK(IndexSet::natural(4).first == 1);
    ModalState m(IndexSet::natural(2), {cplx{3, 0}, cplx{0, 4}});
    CHECK(m.l2_norm() == Approx(5.0));
    CHECK(m.at(7) == cplx{});
    CHECK_THROWS(ModalState(IndexSet::natural(2), {cplx{1, 0}}));
  }
}
