#pragma once

// Experiment runner: config schema, the built-in experiments, and artifact output.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "antidamp/core.hpp"
#include "antidamp/identify.hpp"
#include "antidamp/signal.hpp"
#include "json.hpp"

namespace antidamp {

enum class Engine { Exact, Grid };

struct ExperimentConfig {
  std::string name = "custom";
  std::string system = "wave";
  double q = 3;
  std::optional<PriorSet> prior;  // branch interval of q when absent
  nlohmann::json initial_data = {{"kind", "closed_form"}, {"name", "zero"}};
  DisturbanceSpec disturbance;
  std::vector<double> noise_levels;  // empty: a single run with `disturbance`
  int seeds = 20;
  std::uint64_t seed = 20240101;
  std::int64_t n_syn = 5000;
  std::int64_t n_rec = 1000;
  std::vector<double> sweep_T1;  // estimation windows (T1, T1 + window_length)
  double window_length = 1;
  std::vector<double> reconstruction_T1;
  bool reconstruct_with_true_q = false;
  std::size_t profile_points = 101;
  std::size_t quadrature_points = 4097;
  Engine engine = Engine::Exact;

  nlohmann::json to_json() const;
  /// Throws ConfigError on schema or consistency violations.
  static ExperimentConfig from_json(const nlohmann::json& j);
  void validate() const;
};

/// start, start + step, ... below end, then end itself.
std::vector<double> sweep_points(double start, double end, double step);

struct ResultRow {
  std::string label;
  double q_hat = 0;
  double abs_err = 0;
  std::optional<double> l2_err_u0;
  std::optional<double> l2_err_u1;
};

struct SweepRow {
  double T1 = 0;
  double T2 = 0;
  std::optional<double> q_hat;
  std::optional<double> f_hat;
  std::optional<double> abs_err;
  std::optional<double> f_bound;
  std::optional<double> epsilon;
  std::optional<double> norm_near;
  std::optional<double> norm_far;
  std::string status = "ok";
};

struct ReconstructionResult {
  double T1 = 0;
  double q_used = 0;
  std::string q_source;  // "estimate" or "true"
  ProfileError error;
  double modal_error = 0;  // l2 over the reconstruction index set
  Profile profile;
};

struct NoiseRun {
  double level = 0;
  std::uint64_t seed = 0;
  double q_hat = 0;
  double abs_err = 0;
  double l2_err_u0 = 0;
  std::optional<double> l2_err_u1;
  std::string status = "ok";
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> table;
  std::vector<SweepRow> sweep;
  std::vector<ReconstructionResult> reconstructions;
  std::vector<NoiseRun> noise_runs;
  std::optional<double> disturbance_bound;
  double horizon = 0;
  std::vector<std::string> warnings;

  nlohmann::json report_json() const;
};

std::vector<ExperimentConfig> builtin_experiments();
/// Throws ConfigError for an unknown name.
ExperimentConfig builtin_experiment(const std::string& name);

/// Runs the pipeline; writes table.csv, sweep.csv, profile_T1=<v>.csv,
/// noise_runs.csv (noisy configs) and report.json when out_dir is non-empty.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir = "");

/// The measured output of a config over [0, horizon] on the residual grid.
GridSignal simulate_output(const ExperimentConfig& config);

/// Estimation and reconstruction on an externally supplied measurement.
nlohmann::json identify_measurement(const ExperimentConfig& config, const GridSignal& y);

void write_table_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Runs fn(0 .. n-1) on worker threads; each index runs exactly once.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace antidamp
