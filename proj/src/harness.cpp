#include "antidamp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "antidamp/errors.hpp"
#include "antidamp/initial_data.hpp"
#include "antidamp/numeric.hpp"
#include "antidamp/systems.hpp"

namespace antidamp {
namespace {

nlohmann::json bound_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double bound_from_json(const nlohmann::json& j, double infinite) {
  if (j.is_null()) return infinite;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError("prior bound must be a number, 'inf', '-inf' or null");
  }
  return j.get<double>();
}

nlohmann::json prior_json(const PriorSet& p) {
  return {{"lower", bound_json(p.lower)},
          {"upper", bound_json(p.upper)},
          {"lower_closed", p.lower_closed},
          {"upper_closed", p.upper_closed}};
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return format_double(*v);
  return *v;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const PriorSetError*>(&e)) return "prior_set";
  if (dynamic_cast<const ZeroSignalError*>(&e)) return "zero_signal";
  if (dynamic_cast<const SingularParameterError*>(&e)) return "singular";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  return "error";
}

ModalState restrict_state(const ModalState& s, IndexSet idx) {
  ModalState out = ModalState::zero(idx);
  for (std::size_t i = 0; i < idx.size(); ++i) out.coeffs[i] = s.at(idx.at(i));
  return out;
}

std::string profile_name(double T1, const std::string& suffix = "") {
  return "profile_T1=" + format_short(T1) + suffix + ".csv";
}

// Everything derived from a config that the runs share.
struct Setup {
  std::unique_ptr<SpectralModel> model;
  InitialData data;
  ModalState truth;      // over the synthesis window
  ModalState truth_rec;  // over the reconstruction window
  std::optional<ModalSignal> clean;
  Profile true_profile;
  double period = 0;
  double horizon = 0;
  double step = 0;  // residual grid step
  std::size_t samples = 0;
  std::optional<double> bound;
  std::vector<cplx> clean_samples;  // filled on demand

  Signal signal_for(const DisturbanceSpec& spec, Engine engine) {
    if (engine == Engine::Exact) {
      if (spec.is_none()) return *clean;
      if (spec.kind == DisturbanceKind::MultiplicativeNoise) {
        ensure_samples();
        return DisturbedSignal(*clean, GridSignal(0.0, step, noise_residual(clean_samples, spec.level, spec.seed)));
      }
      return make_disturbed(*clean, spec, 0.0, horizon, step);
    }
    ensure_samples();
    return apply_disturbance(GridSignal(0.0, step, clean_samples), spec);
  }

  void ensure_samples() {
    if (clean_samples.empty()) clean_samples = clean->sample(0.0, step, samples);
  }
};

Setup prepare(const ExperimentConfig& cfg) {
  Setup s;
  try {
    const PriorSet prior = cfg.prior ? *cfg.prior : systems::default_prior(cfg.system, cfg.q);
    s.model = systems::make_model(cfg.system, prior);
    s.model->check_parameter(cfg.q);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid system configuration: ") + e.what());
  }
  s.data = initial_data_from_json(cfg.initial_data);
  if (s.model->state_dim() == 2 && !s.data.has_velocity()) {
    throw ConfigError("system '" + cfg.system + "' needs initial velocity u1");
  }
  s.period = s.model->period();
  double horizon = 0;
  for (double t : cfg.sweep_T1) horizon = std::max(horizon, t + cfg.window_length);
  for (double t : cfg.reconstruction_T1) horizon = std::max(horizon, t + s.period);
  s.horizon = horizon > 0 ? horizon : s.period;
  const double shortest = cfg.sweep_T1.empty() ? s.period : std::min(cfg.window_length, s.period);
  const double max_step = default_residual_step(s.period, shortest);
  auto intervals = static_cast<std::size_t>(std::ceil(s.horizon / max_step - 1e-9));
  intervals = std::max<std::size_t>(intervals, 2);
  if (intervals % 2 == 1) ++intervals;
  s.step = s.horizon / static_cast<double>(intervals);
  s.samples = intervals + 1;

  ProjectionOptions popts;
  popts.quadrature_points = cfg.quadrature_points;
  s.truth = project_initial(*s.model, cfg.q, s.data, s.model->index_window(cfg.n_syn), popts);
  s.truth_rec = restrict_state(s.truth, s.model->index_window(cfg.n_rec));
  s.clean.emplace(*s.model, cfg.q, s.truth);
  s.true_profile = sample_profile(s.data, s.model->state_dim() == 2, cfg.profile_points);
  if (cfg.disturbance.deterministic() && !cfg.disturbance.is_none()) {
    s.bound = cfg.disturbance.sup_bound(0.0, s.horizon);
  }
  return s;
}

SweepRow sweep_row(const Signal& y, const Setup& s, const ExperimentConfig& cfg, double T1) {
  SweepRow row;
  row.T1 = T1;
  row.T2 = T1 + cfg.window_length;
  try {
    EstimationOptions opts;
    opts.disturbance_bound = s.bound;
    if (s.bound) opts.clean_far_norm = window_l2_norm(*s.clean, T1 - s.period, row.T2 - s.period);
    const auto rep = estimate_q(y, *s.model, {T1, row.T2}, opts);
    row.q_hat = rep.q_hat;
    row.f_hat = rep.f_hat;
    row.abs_err = std::abs(rep.q_hat - cfg.q);
    row.f_bound = rep.f_error_bound;
    row.epsilon = rep.epsilon;
    row.norm_near = rep.norm_near;
    row.norm_far = rep.norm_far;
  } catch (const PriorSetError& e) {
    row.f_hat = e.f_hat();
    row.status = status_of(e);
  } catch (const Error& e) {
    row.status = status_of(e);
  }
  return row;
}

ReconstructionResult reconstruct(const Signal& y, const Setup& s, const ExperimentConfig& cfg, double T1, double q,
                                 std::string source) {
  ReconstructionResult r;
  r.T1 = T1;
  r.q_used = q;
  r.q_source = std::move(source);
  const auto est = reconstruct_initial(y, *s.model, q, T1, s.model->index_window(cfg.n_rec));
  r.modal_error = modal_l2_distance(est, s.truth_rec);
  r.profile = synthesize_profile(*s.model, q, est, cfg.profile_points);
  r.error = profile_l2_error(r.profile, s.true_profile);
  return r;
}

void write_file(const std::filesystem::path& p, const std::function<void(std::ostream&)>& fn) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  fn(os);
  if (!os) throw Error("write failed for " + p.string());
}

}  // namespace

// ---------------------------------------------------------------- config

std::vector<double> sweep_points(double start, double end, double step) {
  if (!(step > 0)) throw ConfigError("sweep step must be positive");
  std::vector<double> out;
  if (end < start) return out;
  for (std::size_t k = 0;; ++k) {
    const double t = std::round((start + step * static_cast<double>(k)) * 1e9) / 1e9;
    if (t >= end - 1e-9) break;
    out.push_back(t);
  }
  out.push_back(end);
  return out;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"name", name},
                   {"system", system},
                   {"q", q},
                   {"initial_data", initial_data},
                   {"disturbance", disturbance.to_json()},
                   {"seed", seed},
                   {"n_syn", n_syn},
                   {"n_rec", n_rec},
                   {"windows", {{"kind", "list"}, {"T1", sweep_T1}, {"length", window_length}}},
                   {"reconstruction",
                    {{"T1", reconstruction_T1}, {"q", reconstruct_with_true_q ? "true" : "estimate"},
                     {"points", profile_points}}},
                   {"quadrature_points", quadrature_points},
                   {"engine", engine == Engine::Exact ? "exact" : "grid"}};
  if (prior) j["prior"] = prior_json(*prior);
  if (!noise_levels.empty()) j["noise"] = {{"levels", noise_levels}, {"seeds", seeds}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    c.name = j.value("name", c.name);
    c.system = j.at("system").get<std::string>();
    c.q = j.at("q").get<double>();
    if (j.contains("prior")) {
      const auto& p = j.at("prior");
      PriorSet ps;
      ps.lower = bound_from_json(p.value("lower", nlohmann::json()), -kInf);
      ps.upper = bound_from_json(p.value("upper", nlohmann::json()), kInf);
      ps.lower_closed = p.value("lower_closed", false);
      ps.upper_closed = p.value("upper_closed", false);
      c.prior = ps;
    }
    if (j.contains("initial_data")) c.initial_data = j.at("initial_data");
    if (j.contains("disturbance")) c.disturbance = DisturbanceSpec::from_json(j.at("disturbance"));
    if (j.contains("noise")) {
      c.noise_levels = j.at("noise").at("levels").get<std::vector<double>>();
      c.seeds = j.at("noise").value("seeds", c.seeds);
    }
    c.seed = j.value("seed", c.seed);
    c.n_syn = j.value("n_syn", c.n_syn);
    c.n_rec = j.value("n_rec", c.n_rec);
    if (j.contains("windows")) {
      const auto& w = j.at("windows");
      const auto kind = w.at("kind").get<std::string>();
      if (kind == "fixed") {
        const double T1 = w.at("T1").get<double>();
        const double T2 = w.at("T2").get<double>();
        c.sweep_T1 = {T1};
        c.window_length = T2 - T1;
      } else if (kind == "sweep") {
        c.sweep_T1 = sweep_points(w.at("start").get<double>(), w.at("end").get<double>(), w.at("step").get<double>());
        c.window_length = w.at("length").get<double>();
      } else if (kind == "list") {
        c.sweep_T1 = w.at("T1").get<std::vector<double>>();
        c.window_length = w.at("length").get<double>();
      } else {
        throw ConfigError("windows.kind must be 'fixed', 'sweep' or 'list'");
      }
    }
    if (j.contains("reconstruction")) {
      const auto& r = j.at("reconstruction");
      c.reconstruction_T1 = r.value("T1", std::vector<double>{});
      const auto src = r.value("q", std::string("estimate"));
      if (src != "estimate" && src != "true") throw ConfigError("reconstruction.q must be 'estimate' or 'true'");
      c.reconstruct_with_true_q = src == "true";
      c.profile_points = r.value("points", c.profile_points);
    }
    c.quadrature_points = j.value("quadrature_points", c.quadrature_points);
    const auto engine = j.value("engine", std::string("exact"));
    if (engine == "exact") {
      c.engine = Engine::Exact;
    } else if (engine == "grid") {
      c.engine = Engine::Grid;
    } else {
      throw ConfigError("engine must be 'exact' or 'grid'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (system != "wave" && system != "schrodinger" && system != "strings") {
    throw ConfigError("unknown system '" + system + "'");
  }
  if (!std::isfinite(q)) throw ConfigError("q must be finite");
  if (n_syn < 1 || n_rec < 1) throw ConfigError("truncation levels must be positive");
  if (n_rec > n_syn) throw ConfigError("n_rec must not exceed n_syn");
  if (!(window_length > 0)) throw ConfigError("window length must be positive");
  for (double t : sweep_T1) {
    if (!std::isfinite(t) || t < 0) throw ConfigError("window T1 values must be finite and non-negative");
  }
  for (double t : reconstruction_T1) {
    if (!std::isfinite(t) || t < 0) throw ConfigError("reconstruction T1 values must be finite and non-negative");
  }
  if (!noise_levels.empty()) {
    if (sweep_T1.empty()) throw ConfigError("noise levels need an estimation window");
    if (seeds < 1) throw ConfigError("noise seeds must be positive");
    for (double l : noise_levels) {
      if (!(l >= 0)) throw ConfigError("noise levels must be non-negative");
    }
    if (!disturbance.is_none()) throw ConfigError("noise levels cannot be combined with a disturbance");
  }
  if (profile_points < 2) throw ConfigError("profile needs at least two points");
  if (quadrature_points < 3) throw ConfigError("quadrature needs at least three points");
}

// ---------------------------------------------------------------- builtins

std::vector<ExperimentConfig> builtin_experiments() {
  std::vector<ExperimentConfig> out;

  ExperimentConfig noisy;
  noisy.name = "wave-noisy";
  noisy.system = "wave";
  noisy.q = -3;
  noisy.initial_data = {{"kind", "closed_form"}, {"name", "wave_sine"}, {"params", {{"A", -3.0}, {"B", kPi}}}};
  noisy.noise_levels = {0.0, 0.01, 0.03};
  noisy.sweep_T1 = {2.0};
  noisy.window_length = 0.5;
  noisy.reconstruction_T1 = {0.0};
  out.push_back(noisy);

  ExperimentConfig wave;
  wave.name = "wave-disturbed";
  wave.system = "wave";
  wave.q = 3;
  wave.initial_data = {{"kind", "closed_form"}, {"name", "wave_sine"}, {"params", {{"A", 3.0}, {"B", kPi}}}};
  wave.disturbance = DisturbanceSpec::wave_example();
  wave.disturbance.bound = 5.0;  // 2 |sin| + 3 |cos|
  wave.sweep_T1 = sweep_points(2, 10, 0.1);
  wave.window_length = 3;
  wave.reconstruction_T1 = {0.0, 3.0, 7.0};
  out.push_back(wave);

  ExperimentConfig schr;
  schr.name = "schrodinger";
  schr.system = "schrodinger";
  schr.q = 0.7;
  schr.initial_data = {{"kind", "closed_form"}, {"name", "schrodinger_example"}};
  schr.disturbance = DisturbanceSpec::schrodinger_example();
  schr.disturbance.bound = std::sqrt(13.0);  // |2 sin + 3i cos|
  schr.sweep_T1 = sweep_points(2.55, 10, 0.1);
  schr.window_length = 1;
  schr.reconstruction_T1 = {3.0, 7.0};
  out.push_back(schr);

  ExperimentConfig str;
  str.name = "strings";
  str.system = "strings";
  str.q = 3;
  str.initial_data = {{"kind", "closed_form"}, {"name", "strings_example"}};
  str.disturbance = DisturbanceSpec::strings_example();
  str.disturbance.bound = 2.0;
  str.sweep_T1 = sweep_points(2, 8, 0.1);
  str.window_length = 1;
  str.reconstruction_T1 = {3.0, 7.0};
  out.push_back(str);

  return out;
}

ExperimentConfig builtin_experiment(const std::string& name) {
  for (auto& c : builtin_experiments()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

// ---------------------------------------------------------------- running

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  Setup s = prepare(config);
  ExperimentResult res;
  res.config = config;
  res.horizon = s.horizon;
  res.disturbance_bound = s.bound;

  const Signal base = s.signal_for(config.disturbance, config.engine);

  res.sweep.resize(config.sweep_T1.size());
  parallel_for(config.sweep_T1.size(),
               [&](std::size_t i) { res.sweep[i] = sweep_row(base, s, config, config.sweep_T1[i]); });
  for (const auto& row : res.sweep) {
    if (row.status != "ok") {
      res.warnings.push_back("window T1 = " + format_short(row.T1) + ": " + row.status);
    }
  }

  // q for reconstruction: the estimate at the largest successful T1.
  double q_rec = config.q;
  std::string q_source = "true";
  if (!config.reconstruct_with_true_q) {
    for (auto it = res.sweep.rbegin(); it != res.sweep.rend(); ++it) {
      if (it->q_hat) {
        q_rec = *it->q_hat;
        q_source = "estimate";
        break;
      }
    }
    if (q_source == "true" && !config.reconstruction_T1.empty()) {
      res.warnings.push_back("no successful estimate; reconstructing with the true q");
    }
  }

  if (config.noise_levels.empty()) {
    for (double T1 : config.reconstruction_T1) {
      try {
        res.reconstructions.push_back(reconstruct(base, s, config, T1, q_rec, q_source));
      } catch (const Error& e) {
        res.warnings.push_back("reconstruction at T1 = " + format_short(T1) + ": " + e.what());
      }
    }
    for (const auto& row : res.sweep) {
      ResultRow r;
      r.label = "T1=" + format_short(row.T1);
      r.q_hat = row.q_hat.value_or(std::nan(""));
      r.abs_err = row.abs_err.value_or(std::nan(""));
      res.table.push_back(r);
    }
    for (const auto& rec : res.reconstructions) {
      ResultRow r;
      r.label = "reconstruct T1=" + format_short(rec.T1);
      r.q_hat = rec.q_used;
      r.abs_err = std::abs(rec.q_used - config.q);
      r.l2_err_u0 = rec.error.u0;
      r.l2_err_u1 = rec.error.u1;
      res.table.push_back(r);
    }
  } else {
    struct Task {
      double level;
      std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (double level : config.noise_levels) {
      const int reps = level == 0 ? 1 : config.seeds;
      for (int i = 0; i < reps; ++i) tasks.push_back({level, config.seed + static_cast<std::uint64_t>(i)});
    }
    s.ensure_samples();
    const double T1 = config.sweep_T1.front();
    const WindowSpec window{T1, T1 + config.window_length};
    const std::optional<double> rec_T1 =
        config.reconstruction_T1.empty() ? std::nullopt : std::optional<double>(config.reconstruction_T1.front());
    std::vector<std::optional<ReconstructionResult>> first_profiles(tasks.size());
    res.noise_runs.resize(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) {
      NoiseRun run;
      run.level = tasks[i].level;
      run.seed = tasks[i].seed;
      const Signal y = s.signal_for(DisturbanceSpec::noise(run.level, run.seed), config.engine);
      double q_used = config.q;
      std::string src = "true";
      try {
        const auto rep = estimate_q(y, *s.model, window);
        run.q_hat = rep.q_hat;
        run.abs_err = std::abs(rep.q_hat - config.q);
        if (!config.reconstruct_with_true_q) {
          q_used = rep.q_hat;
          src = "estimate";
        }
      } catch (const Error& e) {
        run.q_hat = run.abs_err = std::nan("");
        run.status = status_of(e);
      }
      if (rec_T1) {
        try {
          auto rec = reconstruct(y, s, config, *rec_T1, q_used, src);
          run.l2_err_u0 = rec.error.u0;
          run.l2_err_u1 = rec.error.u1;
          first_profiles[i] = std::move(rec);
        } catch (const Error& e) {
          run.l2_err_u0 = std::nan("");
          run.status = status_of(e);
        }
      }
      res.noise_runs[i] = run;
    });
    for (double level : config.noise_levels) {
      std::vector<double> q, err, e0, e1;
      bool first = true;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].level != level) continue;
        const auto& run = res.noise_runs[i];
        q.push_back(run.q_hat);
        err.push_back(run.abs_err);
        e0.push_back(run.l2_err_u0);
        if (run.l2_err_u1) e1.push_back(*run.l2_err_u1);
        if (first && first_profiles[i]) {
          auto rec = *first_profiles[i];
          if (level == 0) res.reconstructions.push_back(std::move(rec));
          first = false;
        }
      }
      ResultRow r;
      r.label = "noise=" + format_short(level);
      r.q_hat = median(q);
      r.abs_err = median(err);
      if (rec_T1) {
        r.l2_err_u0 = median(e0);
        if (!e1.empty()) r.l2_err_u1 = median(e1);
      }
      res.table.push_back(r);
    }
    if (!out_dir.empty() && rec_T1) {
      std::filesystem::create_directories(out_dir);
      for (double level : config.noise_levels) {
        if (level == 0) continue;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          if (tasks[i].level == level && first_profiles[i]) {
            write_file(std::filesystem::path(out_dir) / profile_name(*rec_T1, "_noise=" + format_short(level)),
                       [&](std::ostream& os) { write_profile_csv(os, first_profiles[i]->profile); });
            break;
          }
        }
      }
    }
  }

  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "table.csv", [&](std::ostream& os) { write_table_csv(os, res.table); });
    write_file(dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, res.sweep); });
    for (const auto& rec : res.reconstructions) {
      write_file(dir / profile_name(rec.T1), [&](std::ostream& os) { write_profile_csv(os, rec.profile); });
    }
    if (!res.noise_runs.empty()) {
      write_file(dir / "noise_runs.csv", [&](std::ostream& os) {
        os << "level,seed,q_hat,abs_err,l2_err_u0,l2_err_u1,status\n";
        for (const auto& r : res.noise_runs) {
          os << format_double(r.level) << ',' << r.seed << ',' << format_double(r.q_hat) << ','
             << format_double(r.abs_err) << ',' << format_double(r.l2_err_u0) << ',' << opt(r.l2_err_u1) << ','
             << r.status << '\n';
        }
      });
    }
    write_file(dir / "report.json", [&](std::ostream& os) { os << res.report_json().dump(2) << '\n'; });
  }
  return res;
}

nlohmann::json ExperimentResult::report_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["environment"] = {{"compiler", __VERSION__},
                      {"cplusplus", static_cast<long>(__cplusplus)},
                      {"engine", config.engine == Engine::Exact ? "exact" : "grid"}};
  j["seed"] = config.seed;
  j["horizon"] = horizon;
  j["disturbance_bound"] = opt_json(disturbance_bound);
  nlohmann::json table_j = nlohmann::json::array();
  for (const auto& r : table) {
    table_j.push_back({{"label", r.label},
                       {"q_hat", opt_json(r.q_hat)},
                       {"abs_err", opt_json(r.abs_err)},
                       {"l2_err_u0", opt_json(r.l2_err_u0)},
                       {"l2_err_u1", opt_json(r.l2_err_u1)}});
  }
  j["table"] = table_j;
  nlohmann::json rec_j = nlohmann::json::array();
  for (const auto& r : reconstructions) {
    rec_j.push_back({{"T1", r.T1},
                     {"q_used", r.q_used},
                     {"q_source", r.q_source},
                     {"l2_err_u0", r.error.u0},
                     {"l2_err_u1", opt_json(r.error.u1)},
                     {"modal_l2_error", r.modal_error}});
  }
  j["reconstructions"] = rec_j;
  std::size_t ok = 0;
  for (const auto& r : sweep) ok += r.status == "ok";
  j["sweep"] = {{"points", sweep.size()}, {"succeeded", ok}};
  if (!sweep.empty()) {
    const auto& last = sweep.back();
    j["sweep"]["last"] = {{"T1", last.T1}, {"q_hat", opt_json(last.q_hat)}, {"abs_err", opt_json(last.abs_err)}};
  }
  j["warnings"] = warnings;
  return j;
}

void write_table_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "label,q_hat,abs_err,l2_err_u0,l2_err_u1\n";
  for (const auto& r : rows) {
    os << r.label << ',' << format_double(r.q_hat) << ',' << format_double(r.abs_err) << ',' << opt(r.l2_err_u0)
       << ',' << opt(r.l2_err_u1) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "T1,q_hat,abs_err,f_bound,epsilon,T2,f_hat,norm_near,norm_far,status\n";
  for (const auto& r : rows) {
    os << format_double(r.T1) << ',' << opt(r.q_hat) << ',' << opt(r.abs_err) << ',' << opt(r.f_bound) << ','
       << opt(r.epsilon) << ',' << format_double(r.T2) << ',' << opt(r.f_hat) << ',' << opt(r.norm_near) << ','
       << opt(r.norm_far) << ',' << r.status << '\n';
  }
}

GridSignal simulate_output(const ExperimentConfig& config) {
  config.validate();
  Setup s = prepare(config);
  s.ensure_samples();
  const Signal y = s.signal_for(config.disturbance, config.engine);
  if (const auto* g = std::get_if<GridSignal>(&y)) return *g;
  std::vector<cplx> out = s.clean_samples;
  if (const auto* d = std::get_if<DisturbedSignal>(&y)) {
    const auto& r = d->residual().samples();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += r[k];
  }
  return GridSignal(0.0, s.step, std::move(out));
}

nlohmann::json identify_measurement(const ExperimentConfig& config, const GridSignal& y) {
  config.validate();
  PriorSet prior;
  std::unique_ptr<SpectralModel> model;
  try {
    prior = config.prior ? *config.prior : systems::default_prior(config.system, config.q);
    model = systems::make_model(config.system, prior);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid system configuration: ") + e.what());
  }
  const Signal sig = y;
  nlohmann::json j;
  j["system"] = config.system;
  j["prior"] = prior_json(prior);
  nlohmann::json est = nlohmann::json::array();
  std::optional<double> q_last;
  for (double T1 : config.sweep_T1) {
    try {
      EstimationOptions opts;
      opts.disturbance_bound = config.disturbance.bound;
      auto rep = estimate_q(sig, *model, {T1, T1 + config.window_length}, opts);
      q_last = rep.q_hat;
      est.push_back(rep.to_json());
    } catch (const PriorSetError& e) {
      est.push_back({{"T1", T1}, {"status", "prior_set"}, {"f_hat", e.f_hat()}, {"message", e.what()}});
    } catch (const Error& e) {
      est.push_back({{"T1", T1}, {"status", status_of(e)}, {"message", e.what()}});
    }
  }
  j["estimates"] = est;
  nlohmann::json recs = nlohmann::json::array();
  const double q_rec = config.reconstruct_with_true_q || !q_last ? config.q : *q_last;
  for (double T1 : config.reconstruction_T1) {
    try {
      const auto a = reconstruct_initial(sig, *model, q_rec, T1, model->index_window(config.n_rec));
      const auto p = synthesize_profile(*model, q_rec, a, config.profile_points);
      nlohmann::json prof{{"x", p.x}};
      std::vector<double> re, im;
      for (auto v : p.u0) {
        re.push_back(v.real());
        im.push_back(v.imag());
      }
      prof["re_u0"] = re;
      prof["im_u0"] = im;
      if (!p.u1.empty()) {
        re.clear();
        im.clear();
        for (auto v : p.u1) {
          re.push_back(v.real());
          im.push_back(v.imag());
        }
        prof["re_u1"] = re;
        prof["im_u1"] = im;
      }
      recs.push_back({{"T1", T1}, {"q_used", q_rec}, {"profile", prof}});
    } catch (const Error& e) {
      recs.push_back({{"T1", T1}, {"status", status_of(e)}, {"message", e.what()}});
    }
  }
  j["reconstructions"] = recs;
  return j;
}

}  // namespace antidamp
