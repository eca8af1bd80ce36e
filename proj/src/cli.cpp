#include "dmnls/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmnls/config.hpp"
#include "dmnls/manifest.hpp"
#include "dmnls/plot.hpp"
#include "dmnls/results.hpp"
#include "dmnls/verify.hpp"

namespace dmnls {

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  std::vector<std::string> sets;
  std::string epsilons;
  std::int64_t seed = -1;  // -1: keep config value
  int workers = 4;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* c = cmd->add_option("--config", opts.config_path, "config file (sections: grid, physics, stepper, quadrature, study)");
  if (needs_config) c->required();
  cmd->add_option("--out-dir", opts.out_dir, "output directory (default: $DMNLS_OUT_DIR or '.')");
  cmd->add_option("--format", opts.format, "result table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--set", opts.sets, "override a config key, e.g. --set physics.alpha=3")->take_all();
  cmd->add_option("--epsilons", opts.epsilons, "override study.epsilons, comma separated");
  cmd->add_option("--seed", opts.seed, "override study.seed");
  cmd->add_option("--workers", opts.workers, "max concurrent per-epsilon runs")->check(CLI::PositiveNumber);
}

StudyConfig load_config(const CommonOpts& opts) {
  std::vector<std::string> overrides = opts.sets;
  if (!opts.epsilons.empty()) overrides.push_back("study.epsilons=" + opts.epsilons);
  if (opts.seed >= 0) overrides.push_back("study.seed=" + std::to_string(opts.seed));
  return parse_config(opts.config_path, overrides);
}

std::filesystem::path resolve_out_dir(const CommonOpts& opts) {
  std::string dir = opts.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("DMNLS_OUT_DIR"); env && *env) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

TableFormat parse_format(const std::string& f) { return f == "json" ? TableFormat::json : TableFormat::csv; }
std::string format_ext(const std::string& f) { return f == "json" ? ".json" : ".csv"; }

void write_with_manifest(const std::string& sub, const StudyConfig& cfg, const CommonOpts& opts,
                         ResultTable& table, std::vector<std::string> extra_outputs = {}) {
  const auto dir = resolve_out_dir(opts);
  table.producer = sub;
  table.manifest_hash = config_hash(cfg);
  const std::string table_path = (dir / (sub + format_ext(opts.format))).string();
  write_results(table, parse_format(opts.format), table_path);

  RunManifest manifest;
  manifest.subcommand = sub;
  manifest.timestamp_utc = utc_timestamp_now();
  manifest.seed = cfg.seed;
  manifest.config_text = canonical_config_text(cfg);
  manifest.config_hash = config_hash(cfg);
  manifest.outputs.push_back(table_path);
  for (auto& p : extra_outputs) manifest.outputs.push_back(std::move(p));
  save_manifest(manifest, (dir / (sub + ".manifest.json")).string());
  std::cout << "wrote " << table_path << "\n";
}

ResultTable trajectory_table(const Trajectory& traj) {
  ResultTable t;
  t.columns = {"t", "mass", "l2_norm", "h1_norm", "avg_energy"};
  for (int k = 0; k < traj.size(); ++k)
    t.rows.push_back({traj.times[k], traj.mass_values[k], std::sqrt(traj.mass_values[k]), traj.h1_values[k],
                      traj.energy_values[k]});
  return t;
}

int run_simulate(const StudyConfig& cfg, const CommonOpts& opts, std::optional<Real> epsilon) {
  const Real eps = epsilon.value_or(cfg.epsilons.front());
  if (!(eps > 0)) throw ConfigError("epsilon must be positive");
  const GridPtr grid = study_grid(cfg);
  const ComplexField phi = sample_initial_datum(cfg.initial, grid);
  Trajectory traj = evolve_dm(phi, dm_config(cfg, eps), cfg.horizon, uniform_times(cfg.horizon, cfg.n_out),
                              study_quadrature(cfg));
  traj.config_hash = config_hash(cfg);
  ResultTable table = trajectory_table(traj);
  write_with_manifest("simulate", cfg, opts, table);
  if (traj.blew_up) {
    std::cerr << "blow-up guard tripped at t = " << format_real(traj.last_good_time) << "\n";
    return 2;
  }
  return 0;
}

int run_average(const StudyConfig& cfg, const CommonOpts& opts) {
  const GridPtr grid = study_grid(cfg);
  const ComplexField phi = sample_initial_datum(cfg.initial, grid);
  Trajectory traj = evolve_avg(phi, avg_config(cfg), cfg.horizon, uniform_times(cfg.horizon, cfg.n_out));
  traj.config_hash = config_hash(cfg);
  ResultTable table = trajectory_table(traj);
  write_with_manifest("average", cfg, opts, table);
  if (traj.blew_up) {
    std::cerr << "blow-up guard tripped at t = " << format_real(traj.last_good_time) << "\n";
    return 2;
  }
  return 0;
}

int run_converge(const StudyConfig& cfg, const CommonOpts& opts, bool make_plot) {
  if (const std::string warning = validate_study_config(cfg); !warning.empty())
    std::cerr << "warning: " << warning << "\n";
  const ConvergenceStudy study = convergence_study(cfg, opts.workers);

  ResultTable table;
  table.columns = {"epsilon", "sup_h1_error", "sup_l2_error", "mass_drift", "wall_time_seconds"};
  table.nullable = {false, true, true, true, false};
  for (const auto& r : study.records) {
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    if (r.blew_up)
      table.rows.push_back({r.epsilon, nan, nan, nan, r.wall_time_seconds});
    else
      table.rows.push_back({r.epsilon, r.sup_h1_error, r.sup_l2_error, r.mass_drift, r.wall_time_seconds});
  }

  const auto dir = resolve_out_dir(opts);
  const std::string svg_path = (dir / "converge.svg").string();
  std::vector<std::string> extra;
  if (make_plot) extra.push_back(svg_path);
  write_with_manifest("converge", cfg, opts, table, std::move(extra));

  for (const auto& r : study.records) {
    std::cout << "epsilon " << format_real(r.epsilon) << ": ";
    if (r.blew_up)
      std::cout << "blow-up guard tripped\n";
    else
      std::cout << "sup H1 error " << format_real(r.sup_h1_error) << "\n";
  }
  std::cout << "reference error estimate " << format_real(study.reference_error_estimate) << "\n";
  if (study.fit) std::cout << "fitted order " << format_real(study.fit->slope) << "\n";

  if (make_plot) {
    const std::string table_path = (dir / ("converge" + format_ext(opts.format))).string();
    emit_plot(read_table(table_path), "epsilon", "sup_h1_error", PlotScale::loglog, svg_path,
              study.fit ? std::optional<Real>(study.fit->slope) : std::nullopt);
    std::cout << "wrote " << svg_path << "\n";
  }
  return 0;
}

int run_residual(const StudyConfig& cfg, const CommonOpts& opts) {
  const GridPtr grid = study_grid(cfg);
  const ComplexField phi = sample_initial_datum(cfg.initial, grid);
  const Real min_eps = cfg.epsilons.back();
  const int n_dense = std::max(cfg.n_out, static_cast<int>(std::ceil(cfg.horizon / (min_eps / 4))));
  Trajectory traj = evolve_avg(phi, avg_config(cfg), cfg.horizon, uniform_times(cfg.horizon, n_dense));
  if (traj.blew_up) throw NumericalError("residual: averaged run tripped the blow-up guard");

  const Quadrature quad = study_quadrature(cfg);
  ResultTable table;
  table.columns = {"epsilon", "residual_h1", "ratio_to_previous"};
  table.nullable = {false, false, true};
  Real prev = 0;
  for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const Real eps = cfg.epsilons[i];
    const Real res = oscillatory_residual(traj, eps, cfg.alpha, cfg.d_av, quad);
    table.rows.push_back({eps, res, i == 0 ? std::numeric_limits<Real>::quiet_NaN() : res / prev});
    prev = res;
    std::cout << "epsilon " << format_real(eps) << ": residual " << format_real(res) << "\n";
  }
  write_with_manifest("residual", cfg, opts, table);
  return 0;
}

int run_verify(const StudyConfig& cfg, const CommonOpts& opts) {
  const GridPtr grid = study_grid(cfg);
  std::vector<CheckResult> checks = run_structural_checks(grid, cfg.alpha, cfg.seed);
  std::vector<CheckResult> lemma = run_lemma_checks(grid, cfg.alpha, cfg.trials, cfg.seed);
  checks.insert(checks.end(), lemma.begin(), lemma.end());

  int failures = 0;
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    if (!c.passed) ++failures;
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << format_real(c.value)
              << " threshold=" << format_real(c.threshold);
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    jc["detail"] = c.detail;
    report.push_back(std::move(jc));
  }
  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";

  const auto dir = resolve_out_dir(opts);
  const std::string report_path = (dir / "verify_report.json").string();
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + report_path);
    const std::string payload = report.dump(2) + "\n";
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  }
  RunManifest manifest;
  manifest.subcommand = "verify";
  manifest.timestamp_utc = utc_timestamp_now();
  manifest.seed = cfg.seed;
  manifest.config_text = canonical_config_text(cfg);
  manifest.config_hash = config_hash(cfg);
  manifest.outputs.push_back(report_path);
  save_manifest(manifest, (dir / "verify.manifest.json").string());
  std::cout << "wrote " << report_path << "\n";
  return failures == 0 ? 0 : 2;
}

int run_plot(const std::string& in_path, const std::string& x_col, const std::string& y_col,
             const std::string& scale, const std::string& out_path, std::optional<Real> slope) {
  const ResultTable table = read_table(in_path);
  const PlotScale ps = scale == "linear" ? PlotScale::linear : PlotScale::loglog;
  std::string out = out_path;
  if (out.empty()) out = std::filesystem::path(in_path).replace_extension(".svg").string();
  emit_plot(table, x_col, y_col, ps, out, slope);
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Pseudospectral solver and verification harness for the dispersion-managed NLS and its averaged equation"};
  app.require_subcommand(1);

  CommonOpts sim_opts, avg_opts, conv_opts, res_opts, ver_opts;
  std::optional<Real> sim_epsilon;
  bool conv_plot = false;

  auto* sim = app.add_subcommand("simulate", "one managed run; writes trajectory norms");
  add_common(sim, sim_opts, true);
  Real sim_eps_value = -1;
  sim->add_option("--epsilon", sim_eps_value, "epsilon for this run (default: first of study.epsilons)")
      ->check(CLI::PositiveNumber);

  auto* avg = app.add_subcommand("average", "one averaged-equation run; writes trajectory norms");
  add_common(avg, avg_opts, true);

  auto* conv = app.add_subcommand("converge", "epsilon sweep against the averaged reference");
  add_common(conv, conv_opts, true);
  conv->add_flag("--plot", conv_plot, "also render converge.svg (loglog decay curve)");

  auto* res = app.add_subcommand("residual", "oscillatory-residual decay table over the epsilon list");
  add_common(res, res_opts, true);

  auto* ver = app.add_subcommand("verify", "structural and bound-suite checks with pass/fail summary");
  add_common(ver, ver_opts, true);

  auto* plt = app.add_subcommand("plot", "render an SVG from a persisted result table");
  std::string plot_in, plot_x = "epsilon", plot_y = "sup_h1_error", plot_scale = "loglog", plot_out;
  Real plot_slope = std::numeric_limits<Real>::quiet_NaN();
  plt->add_option("--in", plot_in, "result table (.csv or .json)")->required();
  plt->add_option("--x", plot_x, "x column");
  plt->add_option("--y", plot_y, "y column");
  plt->add_option("--scale", plot_scale, "linear or loglog")->check(CLI::IsMember({"linear", "loglog"}));
  plt->add_option("--out", plot_out, "output SVG path (default: input with .svg)");
  plt->add_option("--slope", plot_slope, "annotate a fitted slope");

  std::vector<std::string> argv_reversed(args.rbegin(), args.rend());
  try {
    app.parse(argv_reversed);  // CLI11's vector overload expects reversed args
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      if (sim_eps_value > 0) sim_epsilon = sim_eps_value;
      return run_simulate(load_config(sim_opts), sim_opts, sim_epsilon);
    }
    if (avg->parsed()) return run_average(load_config(avg_opts), avg_opts);
    if (conv->parsed()) return run_converge(load_config(conv_opts), conv_opts, conv_plot);
    if (res->parsed()) return run_residual(load_config(res_opts), res_opts);
    if (ver->parsed()) return run_verify(load_config(ver_opts), ver_opts);
    if (plt->parsed())
      return run_plot(plot_in, plot_x, plot_y, plot_scale, plot_out,
                      std::isnan(plot_slope) ? std::nullopt : std::optional<Real>(plot_slope));
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dmnls
