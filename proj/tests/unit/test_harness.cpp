#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "antidamp/errors.hpp"
#include "antidamp/harness.hpp"
#include "antidamp/numeric.hpp"
#include "doctest.h"

using namespace antidamp;
using doctest::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("antidamp_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

// A fast wave config with a disturbance and a short sweep.
ExperimentConfig small_config() {
  auto c = builtin_experiment("wave-disturbed");
  c.n_syn = 100;
  c.n_rec = 40;
  c.sweep_T1 = sweep_points(2, 4, 0.5);
  c.reconstruction_T1 = {0, 3};
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("registry of built-in experiments") {
    const auto all = builtin_experiments();
    REQUIRE(all.size() == 4);
    CHECK(all[0].name == "wave-noisy");
    CHECK(all[1].name == "wave-disturbed");
    CHECK(all[2].name == "schrodinger");
    CHECK(all[3].name == "strings");
    const auto noisy = builtin_experiment("wave-noisy");
    CHECK(noisy.noise_levels == std::vector<double>{0, 0.01, 0.03});
    CHECK(noisy.seeds == 20);
    CHECK(noisy.sweep_T1 == std::vector<double>{2});
    CHECK(noisy.window_length == 0.5);
    const auto s = builtin_experiment("schrodinger");
    CHECK(s.sweep_T1.front() == 2.55);
    CHECK(s.sweep_T1.back() == 10);
    CHECK(s.window_length == 1);
    CHECK(builtin_experiment("strings").sweep_T1.back() == 8);
    CHECK_THROWS_AS(builtin_experiment("plate"), ConfigError);
    for (const auto& c : all) CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("sweep points") {
    const auto p = sweep_points(2, 10, 0.1);
    CHECK(p.size() == 81);
    CHECK(p[1] == 2.1);
    CHECK(p[55] == 7.5);
    CHECK(p.back() == 10);
    CHECK(sweep_points(2, 3, 0.4) == std::vector<double>{2, 2.4, 2.8, 3});
    CHECK(sweep_points(3, 2, 0.1).empty());
    CHECK_THROWS_AS(sweep_points(0, 1, 0), ConfigError);
  }

  TEST_CASE("config JSON round trip") {
    for (auto c : builtin_experiments()) {
      c.prior = PriorSet{c.q - 0.5, kInf, false, false};
      if (c.system == "wave" && c.q < 0) c.prior = PriorSet{-kInf, -1.0, false, false};
      const auto back = ExperimentConfig::from_json(c.to_json());
      CHECK(back.to_json() == c.to_json());
      CHECK(back.sweep_T1 == c.sweep_T1);
      CHECK(back.noise_levels == c.noise_levels);
      REQUIRE(back.prior.has_value());
      CHECK(std::isinf(back.prior->upper) == std::isinf(c.prior->upper));
    }
    const auto j = nlohmann::json::parse(R"({
      "system": "wave", "q": 3,
      "initial_data": {"kind": "closed_form", "name": "wave_sine", "params": {"A": 3, "B": 3.14}},
      "windows": {"kind": "fixed", "T1": 2, "T2": 2.5},
      "prior": {"lower": 1, "upper": "inf"},
      "reconstruction": {"T1": [0], "q": "true"}
    })");
    const auto c = ExperimentConfig::from_json(j);
    CHECK(c.sweep_T1 == std::vector<double>{2});
    CHECK(c.window_length == 0.5);
    CHECK(c.reconstruct_with_true_q);
    CHECK(std::isinf(c.prior->upper));
  }

  TEST_CASE("config errors") {
    auto base = small_config().to_json();
    auto bad = [&](const char* key, nlohmann::json v) {
      auto j = base;
      j[key] = std::move(v);
      CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
    };
    bad("system", "plate");
    bad("q", "three");
    bad("n_rec", 1000);
    bad("n_syn", 0);
    bad("engine", "fast");
    bad("windows", {{"kind", "spiral"}});
    bad("windows", {{"kind", "list"}, {"T1", {2}}, {"length", -1}});
    bad("reconstruction", {{"q", "guess"}});
    bad("disturbance", {{"kind", "hail"}});
    auto missing = base;
    missing.erase("system");
    CHECK_THROWS_AS(ExperimentConfig::from_json(missing), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::array()), ConfigError);
    auto noisy = builtin_experiment("wave-noisy");
    noisy.disturbance = DisturbanceSpec::wave_example();
    CHECK_THROWS_AS(noisy.validate(), ConfigError);
    auto c = small_config();
    c.q = 1.0;
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
  }

  TEST_CASE("empty sweep writes a header-only sweep.csv") {
    auto c = small_config();
    c.sweep_T1.clear();
    const auto dir = scratch("empty");
    const auto r = run_experiment(c, dir.string());
    CHECK(r.sweep.empty());
    CHECK(slurp(dir / "sweep.csv") == "T1,q_hat,abs_err,f_bound,epsilon,T2,f_hat,norm_near,norm_far,status\n");
    CHECK(std::filesystem::exists(dir / "report.json"));
    // no estimate: reconstruction falls back to the true q
    REQUIRE(r.reconstructions.size() == 2);
    CHECK(r.reconstructions[0].q_source == "true");
    CHECK_FALSE(r.warnings.empty());
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("runs are deterministic and write every artifact") {
    auto c = small_config();
    const auto d1 = scratch("det1"), d2 = scratch("det2");
    run_experiment(c, d1.string());
    run_experiment(c, d2.string());
    for (const char* f : {"table.csv", "sweep.csv", "report.json", "profile_T1=0.csv", "profile_T1=3.csv"}) {
      CHECK(std::filesystem::exists(d1 / f));
      CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    auto n = builtin_experiment("wave-noisy");
    n.n_syn = 60;
    n.n_rec = 30;
    n.seeds = 3;
    const auto d3 = scratch("det3"), d4 = scratch("det4");
    run_experiment(n, d3.string());
    run_experiment(n, d4.string());
    for (const char* f : {"table.csv", "noise_runs.csv", "profile_T1=0_noise=0.01.csv"}) {
      CHECK(std::filesystem::exists(d3 / f));
      CHECK(slurp(d3 / f) == slurp(d4 / f));
    }
    for (const auto& d : {d1, d2, d3, d4}) std::filesystem::remove_all(d);
  }

  TEST_CASE("logged norms reproduce the logged estimate") {
    const auto r = run_experiment(small_config());
    REQUIRE(r.sweep.size() == 5);
    for (const auto& row : r.sweep) {
      REQUIRE(row.status == "ok");
      const double ratio = *row.norm_near / *row.norm_far;
      CHECK(std::abs(*row.f_hat - std::log(ratio) / 2) < 1e-12);
      CHECK(std::abs(*row.q_hat - 1 / std::tanh(*row.f_hat)) < 1e-12 * std::abs(*row.q_hat));
      REQUIRE(row.epsilon.has_value());
    }
    CHECK(r.disturbance_bound == 5.0);
    CHECK(r.horizon == Approx(7.0));
    CHECK(r.reconstructions.back().q_source == "estimate");
    CHECK(r.reconstructions.back().q_used == *r.sweep.back().q_hat);
  }

  TEST_CASE("grid engine follows the exact engine") {
    auto c = small_config();
    c.disturbance = DisturbanceSpec::none();
    const auto e = run_experiment(c);
    c.engine = Engine::Grid;
    const auto g = run_experiment(c);
    for (std::size_t i = 0; i < e.sweep.size(); ++i) {
      CHECK(std::abs(*g.sweep[i].q_hat - *e.sweep[i].q_hat) < 1e-6);
    }
  }

  TEST_CASE("simulate and identify round trip") {
    auto c = small_config();
    const auto y = simulate_output(c);
    CHECK(y.t_start() == 0);
    CHECK(y.t_end() == Approx(7.0));
    const auto j = identify_measurement(c, y);
    REQUIRE(j.contains("estimates"));
    CHECK(std::abs(j["estimates"].back()["q_hat"].get<double>() - 3) < 0.1);
  }

  TEST_CASE("parallel_for visits each index once") {
    std::vector<std::atomic<int>> hits(97);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(4, [](std::size_t i) {
                      if (i == 2) throw DomainError("boom");
                    }),
                    DomainError);
  }
}
