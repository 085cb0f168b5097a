#include "stochgrad/cli/commands.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include <CLI11.hpp>

#include "stochgrad/cli/io.hpp"
#include "stochgrad/experiments.hpp"
#include "stochgrad/simulator.hpp"

namespace stochgrad::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kDisplayTag = 0x444953504c4159ull;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Options every subcommand understands.
struct Shared {
  SimConfig config;
  DetectorParams params;
  EstimatorOptions estimator;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = ".";
  std::optional<double> direction;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = std::min(s.find(',', start), s.size());
    if (comma > start) out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

const CLI::Validator kModeName(
    [](std::string& s) {
      try {
        parse_sim_mode(s);
      } catch (const std::exception& e) {
        return std::string(e.what());
      }
      return std::string();
    },
    "MODE");

const CLI::Validator kModeList(
    [](std::string& s) {
      try {
        for (const auto& m : split_list(s)) parse_sim_mode(m);
      } catch (const std::exception& e) {
        return std::string(e.what());
      }
      return std::string();
    },
    "MODE[,MODE...]");

const CLI::Validator kMethodList(
    [](std::string& s) {
      try {
        for (const auto& m : split_list(s)) parse_method(m);
      } catch (const std::exception& e) {
        return std::string(e.what());
      }
      return std::string();
    },
    "METHOD[,METHOD...]");

void add_shared(CLI::App* sub, Shared& s) {
  auto& c = s.config;
  auto& p = s.params;
  sub->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", s.threads, "Worker threads (0 = runtime default)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--out", s.out, "Output directory")->capture_default_str();

  sub->add_option("--step-size", c.step_size, "Propagation step [m]")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--e-init", c.e_init, "Initial energy [GeV]")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--e-threshold", c.e_threshold, "Stopping energy [GeV]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--eloss", c.eloss, "Energy lost per interaction [GeV]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--opening-angle", c.opening_angle, "Shower opening angle [rad]")->capture_default_str();
  sub->add_option("--target-radius", c.target_radius, "Target radius of the loss [m]")->capture_default_str();
  sub->add_option("--max-steps", c.max_steps, "Step limit per event")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--world-radius", c.world_radius, "World boundary [m]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--direction", s.direction, "Fixed start direction [rad]; random when absent");

  sub->add_option("--sharpness", p.sharpness, "Material map sharpness")->capture_default_str();
  sub->add_option("--seg-freq", p.seg_freq, "Material map segmentation frequency")->capture_default_str();
  sub->add_option("--r-max", p.r_max, "Detector thickness [m]")->capture_default_str()->check(CLI::PositiveNumber);

  auto& e = s.estimator;
  sub->add_option("--fd-eps", e.fd_eps, "Finite-difference step [m]")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--fd-central", e.fd_central, "Central instead of forward differences")->capture_default_str();
  sub->add_option("--fd-common-seed", e.fd_common_seed, "Reuse event streams for the perturbed run")
      ->capture_default_str();
  sub->add_option("--coupling", e.coupling, "Reuse primal randomness in alternatives")->capture_default_str();
}

void apply_shared(Shared& s) {
  s.config.fixed_direction = s.direction;
  s.config.validate();
  s.params.validate();
  if (s.threads > 0) omp_set_num_threads(s.threads);
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  for (const auto& n : split_list(list)) {
    const Method m = parse_method(n);
    if (std::find(out.begin(), out.end(), m) != out.end()) throw UsageError("method listed twice: " + n);
    out.push_back(m);
  }
  if (out.empty()) throw UsageError("no methods given");
  return out;
}

constexpr const char* kAllMethodNames = "numeric,score,score_baseline,stochad";

json estimator_json(const EstimatorOptions& e) {
  return {{"fd_eps", e.fd_eps},
          {"fd_central", e.fd_central},
          {"fd_common_seed", e.fd_common_seed},
          {"coupling", e.coupling}};
}

// Resolved options minus those that cannot change the outputs.
std::string replay_config(const CLI::App& app, const std::string& command) {
  std::istringstream in(app.config_to_str(true, false));
  std::string line;
  std::string kept;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.rfind(command + ".", 0) != 0) continue;
    const std::string leaf = line.substr(command.size() + 1, eq - command.size() - 1);
    if (leaf == "threads" || leaf == "out") continue;
    if (line.compare(eq, std::string::npos, "=\"\"") == 0) continue;  // unset optional
    kept += line;
    kept += '\n';
  }
  return kept;
}

class Run {
 public:
  Run(const CLI::App& app, std::string command, const Shared& shared)
      : app_(app), command_(std::move(command)), shared_(shared), dir_(shared.out) {}

  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }

  void finish(json resolved, std::ostream& out) {
    const std::string cfg = replay_config(app_, command_);
    write_text(path("run.cfg"), cfg);
    resolved["sim"] = to_json(shared_.config);
    resolved["detector"] = to_json(shared_.params);
    resolved["detector"].erase("theta_R");
    resolved["detector"].erase("theta_R_tangent");
    resolved["estimator"] = estimator_json(shared_.estimator);
    json manifest = {{"tool", "stochgrad"},
                     {"version", kVersion},
                     {"command", command_},
                     {"seed", shared_.seed},
                     {"config_hash", git_blob_hash(cfg)},
                     {"config", std::move(resolved)},
                     {"outputs", outputs_},
                     {"replay", "stochgrad --config run.cfg " + command_}};
    write_text(dir_ / "manifest.json", manifest.dump(2) + "\n");
    out << command_ << ": wrote " << outputs_.size() + 1 << " files to " << dir_.string() << "\n";
  }

 private:
  const CLI::App& app_;
  std::string command_;
  const Shared& shared_;
  fs::path dir_;
  std::vector<std::string> outputs_;
};

ExperimentSetup make_setup(const Shared& s, SimMode mode) {
  ExperimentSetup setup{s.config, s.params, s.estimator, s.seed};
  setup.config.mode = mode;
  return setup;
}

// ---- scan

struct ScanArgs {
  Shared shared;
  std::string mode = "energy-loss";
  double theta_min = 1.0;
  double theta_max = 4.0;
  std::size_t points = 31;
  std::size_t n = 1000;
  std::string methods = kAllMethodNames;
  int poly_degree = 6;
};

void add_scan(CLI::App& app, ScanArgs& a) {
  auto* sub = app.add_subcommand("scan", "Loss landscape and gradient estimators over a theta grid");
  add_shared(sub, a.shared);
  sub->add_option("--mode", a.mode, "energy-loss | shower | mixed")->capture_default_str()->check(kModeName);
  sub->add_option("--theta-min", a.theta_min, "Lowest inner radius [m]")->capture_default_str();
  sub->add_option("--theta-max", a.theta_max, "Highest inner radius [m]")->capture_default_str();
  sub->add_option("--points", a.points, "Grid points")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--n", a.n, "Events per grid point")->capture_default_str()->check(CLI::Range(2, 100000000));
  sub->add_option("--methods", a.methods, "Estimators")->capture_default_str()->check(kMethodList);
  sub->add_option("--poly-degree", a.poly_degree, "Degree of the mean-loss fit")
      ->capture_default_str()
      ->check(CLI::Range(0, 12));
}

int run_scan(const CLI::App& app, ScanArgs& a, std::ostream& out) {
  if (!(a.theta_min > 0.0)) throw UsageError("--theta-min must be positive");
  if (a.points > 1 && !(a.theta_max > a.theta_min)) throw UsageError("--theta-max must exceed --theta-min");
  const auto methods = parse_methods(a.methods);
  apply_shared(a.shared);
  const ExperimentSetup setup = make_setup(a.shared, parse_sim_mode(a.mode));

  std::vector<double> grid(a.points);
  for (std::size_t i = 0; i < a.points; ++i) {
    grid[i] = a.points == 1 ? a.theta_min
                            : a.theta_min + (a.theta_max - a.theta_min) * static_cast<double>(i) /
                                                static_cast<double>(a.points - 1);
  }
  const ScanResult res = scan(setup, grid, a.n, methods, a.poly_degree);

  Run run(app, "scan", a.shared);
  CsvTable loss_csv({"theta", "loss_mean", "loss_median", "q25", "q75", "poly_fit_grad"});
  CsvTable grad_csv({"theta", "method", "grad_mean", "grad_std", "n"});
  for (const ScanPoint& pt : res.points) {
    loss_csv.cell(pt.theta).cell(pt.loss.mean).cell(pt.loss.q50).cell(pt.loss.q25).cell(pt.loss.q75).cell(
        pt.poly_fit_grad);
    loss_csv.end_row();
    for (const MethodStats& g : pt.grads) {
      grad_csv.cell(pt.theta).cell(to_string(g.method)).cell(g.stats.mean).cell(g.stats.std).cell(g.stats.n);
      grad_csv.end_row();
    }
  }
  loss_csv.save(run.path("scan_loss.csv"));
  grad_csv.save(run.path("scan_grads.csv"));

  const auto best = std::min_element(res.points.begin(), res.points.end(),
                                     [](const ScanPoint& x, const ScanPoint& y) { return x.loss.mean < y.loss.mean; });
  out << "scan: lowest mean loss " << format_double(best->loss.mean) << " at theta " << format_double(best->theta)
      << "\n";
  run.finish({{"mode", a.mode},
              {"theta_min", a.theta_min},
              {"theta_max", a.theta_max},
              {"points", a.points},
              {"n", a.n},
              {"methods", a.methods},
              {"poly_degree", a.poly_degree}},
             out);
  return kOk;
}

// ---- gradstats

struct GradstatsArgs {
  Shared shared;
  std::string modes = "energy-loss,shower";
  double theta = 2.5;
  std::size_t n = 5000;
  std::string methods = kAllMethodNames;
  bool assert_ordering = false;
};

constexpr std::size_t kSmallSample = 30;

void add_gradstats(CLI::App& app, GradstatsArgs& a) {
  auto* sub = app.add_subcommand("gradstats", "Mean, spread and quartiles of every estimator at one theta");
  add_shared(sub, a.shared);
  sub->add_option("--modes", a.modes, "Simulation modes")->capture_default_str()->check(kModeList);
  sub->add_option("--theta", a.theta, "Inner radius [m]")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--n", a.n, "Samples per estimator")->capture_default_str()->check(CLI::Range(2, 100000000));
  sub->add_option("--methods", a.methods, "Estimators")->capture_default_str()->check(kMethodList);
  sub->add_flag("--assert-ordering", a.assert_ordering, "Fail unless the spread ordering holds");
}

const EstimatorStats* find_stats(const std::vector<MethodStats>& rows, Method m) {
  for (const auto& r : rows) {
    if (r.method == m) return &r.stats;
  }
  return nullptr;
}

// Spread ordering numeric > score > score_baseline, stochad <= 2 score_baseline.
bool ordering_holds(const std::vector<MethodStats>& rows, std::string& why) {
  const auto* num = find_stats(rows, Method::Numeric);
  const auto* sc = find_stats(rows, Method::Score);
  const auto* sb = find_stats(rows, Method::ScoreBaseline);
  const auto* ad = find_stats(rows, Method::StochAD);
  if (!num || !sc || !sb || !ad) {
    why = "all four methods are needed";
    return false;
  }
  if (!(num->std > sc->std)) why = "numeric std not above score std";
  else if (!(sc->std > sb->std)) why = "score std not above score_baseline std";
  else if (!(ad->std <= 2.0 * sb->std)) why = "stochad std above twice score_baseline std";
  return why.empty();
}

int run_gradstats(const CLI::App& app, GradstatsArgs& a, std::ostream& out, std::ostream& err) {
  const auto methods = parse_methods(a.methods);
  const auto modes = split_list(a.modes);
  if (modes.empty()) throw UsageError("no modes given");
  apply_shared(a.shared);
  if (a.n < kSmallSample) {
    err << "warning: n = " << a.n << " is a small sample; standard deviations are unreliable\n";
  }

  Run run(app, "gradstats", a.shared);
  CsvTable csv({"mode", "method", "theta", "n", "mean", "std", "q25", "q50", "q75"});
  bool ordered = true;
  for (const auto& mode_name : modes) {
    const SimMode mode = parse_sim_mode(mode_name);
    const auto rows = grad_table(make_setup(a.shared, mode), a.theta, a.n, methods);
    for (const auto& r : rows) {
      const auto& s = r.stats;
      csv.cell(to_string(mode)).cell(to_string(r.method)).cell(a.theta).cell(s.n).cell(s.mean).cell(s.std);
      csv.cell(s.q25).cell(s.q50).cell(s.q75);
      csv.end_row();
    }
    if (a.assert_ordering) {
      std::string why;
      const bool ok = ordering_holds(rows, why);
      out << "ordering " << to_string(mode) << ": " << (ok ? "ok" : "FAILED (" + why + ")") << "\n";
      ordered = ordered && ok;
    }
  }
  csv.save(run.path("gradstats.csv"));
  run.finish({{"modes", a.modes}, {"theta", a.theta}, {"n", a.n}, {"methods", a.methods}}, out);
  return ordered ? kOk : kRuntimeError;
}

// ---- optimize

struct OptimizeArgs {
  Shared shared;
  std::string mode = "shower";
  std::string methods = kAllMethodNames;
  OptimizeOptions opts;
};

void add_optimize(CLI::App& app, OptimizeArgs& a) {
  auto* sub = app.add_subcommand("optimize", "Adam descent on the inner radius with each estimator");
  add_shared(sub, a.shared);
  auto& o = a.opts;
  o.eval_events = 1000;
  sub->add_option("--mode", a.mode, "energy-loss | shower | mixed")->capture_default_str()->check(kModeName);
  sub->add_option("--methods", a.methods, "Estimators")->capture_default_str()->check(kMethodList);
  sub->add_option("--replicas", o.replicas, "Independent runs per method")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--steps", o.steps, "Adam steps")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--batch", o.batch, "Events per gradient")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--lr", o.adam.lr, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--theta-init", o.theta_init, "Starting inner radius [m]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--theta-min", o.theta_min, "Lower clamp [m]")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--theta-max", o.theta_max, "Upper clamp [m]")->capture_default_str();
  sub->add_option("--eval-events", o.eval_events, "Events for the final expected loss (0 = skip)")
      ->capture_default_str();
}

int run_optimize(const CLI::App& app, OptimizeArgs& a, std::ostream& out) {
  const auto methods = parse_methods(a.methods);
  if (!(a.opts.theta_max > a.opts.theta_min)) throw UsageError("--theta-max must exceed --theta-min");
  if (a.opts.theta_init < a.opts.theta_min || a.opts.theta_init > a.opts.theta_max) {
    throw UsageError("--theta-init must lie within the clamp range");
  }
  apply_shared(a.shared);
  const ExperimentSetup setup = make_setup(a.shared, parse_sim_mode(a.mode));

  Run run(app, "optimize", a.shared);
  CsvTable summary({"method", "replica", "seed", "final_theta", "final_loss", "clamp_events"});
  for (Method m : methods) {
    const auto runs = optimize(setup, m, a.opts);
    CsvTable csv({"replica", "step", "theta", "loss"});
    for (const OptRun& r : runs) {
      for (std::size_t s = 0; s < r.theta_trace.size(); ++s) {
        csv.cell(r.replica_id).cell(s).cell(r.theta_trace[s]).cell(r.loss_trace[s]);
        csv.end_row();
      }
      summary.cell(to_string(m)).cell(r.replica_id).cell(std::to_string(r.seed)).cell(r.theta_trace.back());
      if (a.opts.eval_events > 0) {
        summary.cell(r.final_expected_loss);
      } else {
        summary.cell(std::string_view{});
      }
      summary.cell(r.clamp_events);
      summary.end_row();
    }
    csv.save(run.path(std::string("opt_") + to_string(m) + ".csv"));
  }
  summary.save(run.path("opt_summary.csv"));
  const auto& o = a.opts;
  run.finish({{"mode", a.mode},
              {"methods", a.methods},
              {"replicas", o.replicas},
              {"steps", o.steps},
              {"batch", o.batch},
              {"lr", o.adam.lr},
              {"beta1", o.adam.beta1},
              {"beta2", o.adam.beta2},
              {"adam_eps", o.adam.eps},
              {"theta_init", o.theta_init},
              {"theta_min", o.theta_min},
              {"theta_max", o.theta_max},
              {"eval_events", o.eval_events}},
             out);
  return kOk;
}

// ---- display

struct DisplayArgs {
  Shared shared;
  std::string mode = "shower";
  double theta = 2.5;
  double theta_tangent = 1.0;
  std::uint64_t event = 0;
  std::size_t grid = 200;
  double extent = 6.0;
};

void add_display(CLI::App& app, DisplayArgs& a) {
  auto* sub = app.add_subcommand("display", "One primal event, its alternative and the material map as JSON");
  add_shared(sub, a.shared);
  sub->add_option("--mode", a.mode, "energy-loss | shower | mixed")->capture_default_str()->check(kModeName);
  sub->add_option("--theta", a.theta, "Inner radius [m]")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--theta-tangent", a.theta_tangent, "Tangent seeded on the inner radius")->capture_default_str();
  sub->add_option("--event", a.event, "Event index within the seed")->capture_default_str();
  sub->add_option("--grid", a.grid, "Raster cells per axis")->capture_default_str()->check(CLI::Range(1, 4000));
  sub->add_option("--extent", a.extent, "Raster half-width [m]")->capture_default_str()->check(CLI::PositiveNumber);
}

json material_raster(const DetectorParams& params, std::size_t n, double extent) {
  const double cell = 2.0 * extent / static_cast<double>(n);
  std::vector<double> centers(n);
  for (std::size_t i = 0; i < n; ++i) centers[i] = -extent + (static_cast<double>(i) + 0.5) * cell;
  std::vector<double> values(n * n);
  const auto total = static_cast<std::ptrdiff_t>(n * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const Vec2 pos{centers[static_cast<std::size_t>(k) % n], centers[static_cast<std::size_t>(k) / n]};
    values[k] = pos.x0 == 0.0 && pos.x1 == 0.0 ? 0.0 : material_map(pos, params).value;
  }
  return {{"n", n}, {"extent", extent}, {"centers", centers}, {"layout", "row-major, rows along x1"}, {"values", values}};
}

int run_display(const CLI::App& app, DisplayArgs& a, std::ostream& out) {
  apply_shared(a.shared);
  SimConfig config = a.shared.config;
  config.mode = parse_sim_mode(a.mode);
  const DetectorParams params = a.shared.params.with_theta(Dual{a.theta, a.theta_tangent});
  const EventKey key{a.shared.seed, derive_stream({kDisplayTag, a.event})};

  std::vector<Track> tracks;
  PrimalDraws primal(key, true);
  const Event ev = simulate_event(config, params, primal, &tracks);

  json alternative = nullptr;
  if (const auto weight = pruned_weight(primal.pruning())) {
    const DiscreteAlternative& chosen = *primal.pruning().chosen;
    std::vector<Track> alt_tracks;
    const AlternativeRun alt = run_alternative(config, params, key, primal.trace(),
                                               {chosen.draw_id, chosen.flipped_value},
                                               a.shared.estimator.coupling, &alt_tracks);
    alternative = {{"divergence_step", alt.divergence_step},
                   {"draw_id", chosen.draw_id},
                   {"flipped_value", chosen.flipped_value},
                   {"weight", *weight},
                   {"coupled_draws", alt.coupled_draws},
                   {"fresh_draws", alt.fresh_draws},
                   {"event", event_to_json(alt.event, alt_tracks, config)}};
  }

  json doc = {{"version", kVersion},
              {"mode", to_string(config.mode)},
              {"theta_R", a.theta},
              {"theta_R_tangent", a.theta_tangent},
              {"event_index", a.event},
              {"primal", event_to_json(ev, tracks, config)},
              {"alternative", std::move(alternative)},
              {"material_map", material_raster(params, a.grid, a.extent)}};

  Run run(app, "display", a.shared);
  write_text(run.path("event.json"), doc.dump() + "\n");
  run.finish({{"mode", a.mode},
              {"theta", a.theta},
              {"theta_tangent", a.theta_tangent},
              {"event", a.event},
              {"grid", a.grid},
              {"extent", a.extent}},
             out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Gradient estimators for a stochastic particle-detector simulator", "stochgrad");
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Key=value file with [command] sections; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  ScanArgs scan_args;
  GradstatsArgs grad_args;
  OptimizeArgs opt_args;
  DisplayArgs display_args;
  add_scan(app, scan_args);
  add_gradstats(app, grad_args);
  add_optimize(app, opt_args);
  add_display(app, display_args);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (app.got_subcommand("scan")) return run_scan(app, scan_args, out);
    if (app.got_subcommand("gradstats")) return run_gradstats(app, grad_args, out, err);
    if (app.got_subcommand("optimize")) return run_optimize(app, opt_args, out);
    if (app.got_subcommand("display")) return run_display(app, display_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    // Parameter validation in the library (bad mode, nonpositive sizes, ...).
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace stochgrad::cli
