// antidamp: simulate boundary outputs, identify q and the initial state, run experiments.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "antidamp/errors.hpp"
#include "antidamp/harness.hpp"
#include "antidamp/numeric.hpp"

using namespace antidamp;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> n_syn;
  std::optional<std::int64_t> n_rec;
  std::optional<std::string> engine;
};

ExperimentConfig load_config(const std::string& name_or_path, const Overrides& o) {
  ExperimentConfig c;
  std::ifstream is(name_or_path);
  if (is) {
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("cannot parse ") + name_or_path + ": " + e.what());
    }
    c = ExperimentConfig::from_json(j);
  } else {
    c = builtin_experiment(name_or_path);
  }
  if (o.seed) c.seed = *o.seed;
  if (o.n_syn) c.n_syn = *o.n_syn;
  if (o.n_rec) c.n_rec = *o.n_rec;
  if (o.engine) c.engine = *o.engine == "grid" ? Engine::Grid : Engine::Exact;
  c.validate();
  return c;
}

void print_table(const ExperimentResult& r) {
  std::cout << r.config.name << '\n';
  for (const auto& row : r.table) {
    std::cout << "  " << row.label << "  q_hat=" << format_double(row.q_hat) << "  abs_err=" << format_double(row.abs_err);
    if (row.l2_err_u0) std::cout << "  l2_u0=" << format_double(*row.l2_err_u0);
    if (row.l2_err_u1) std::cout << "  l2_u1=" << format_double(*row.l2_err_u1);
    std::cout << '\n';
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identify anti-damping coefficients and initial states from a boundary output"};
  app.require_subcommand(1);

  std::string config, out, signal_path;
  Overrides o;
  std::uint64_t seed = 0;
  std::int64_t n_syn = 0, n_rec = 0;
  std::string engine;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config, "Config JSON file or built-in experiment name")->required();
    auto* out_opt = sub->add_option("--out", out, "Output path");
    if (needs_out) out_opt->required();
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--n-syn", n_syn, "Synthesis truncation")->check(CLI::PositiveNumber);
    sub->add_option("--n-rec", n_rec, "Reconstruction truncation")->check(CLI::PositiveNumber);
    sub->add_option("--engine", engine, "Integration engine")->check(CLI::IsMember({"exact", "grid"}));
  };

  auto* list = app.add_subcommand("list", "List built-in experiments");
  auto* simulate = app.add_subcommand("simulate", "Write the measured output y(t) as CSV");
  add_common(simulate, true);
  auto* identify = app.add_subcommand("identify", "Estimate q and the initial state from a y(t) CSV");
  add_common(identify, false);
  identify->add_option("--signal", signal_path, "Measurement CSV with header t,re,im")->required();
  auto* experiment = app.add_subcommand("experiment", "Run an experiment and write its artifacts");
  add_common(experiment, true);

  CLI11_PARSE(app, argc, argv);

  auto gather = [&](CLI::App* sub) {
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--n-syn")) o.n_syn = n_syn;
    if (sub->count("--n-rec")) o.n_rec = n_rec;
    if (sub->count("--engine")) o.engine = engine;
  };

  try {
    if (list->parsed()) {
      for (const auto& c : builtin_experiments()) {
        std::cout << c.name << "  system=" << c.system << "  q=" << format_short(c.q) << "  windows=" << c.sweep_T1.size()
                  << '\n';
      }
      return 0;
    }
    if (simulate->parsed()) {
      gather(simulate);
      const auto cfg = load_config(config, o);
      const auto y = simulate_output(cfg);
      std::ofstream os(out);
      if (!os) throw Error("cannot write " + out);
      y.write_csv(os);
      return 0;
    }
    if (identify->parsed()) {
      gather(identify);
      const auto cfg = load_config(config, o);
      std::ifstream is(signal_path);
      if (!is) throw ConfigError("cannot read " + signal_path);
      const auto y = GridSignal::read_csv(is);
      const auto report = identify_measurement(cfg, y).dump(2);
      if (out.empty()) {
        std::cout << report << '\n';
      } else {
        std::ofstream os(out);
        if (!os) throw Error("cannot write " + out);
        os << report << '\n';
      }
      return 0;
    }
    if (experiment->parsed()) {
      gather(experiment);
      const auto cfg = load_config(config, o);
      print_table(run_experiment(cfg, out));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
