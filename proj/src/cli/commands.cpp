#include "cavbell/cli/commands.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cavbell/antenna.hpp"
#include "cavbell/cavity.hpp"
#include "cavbell/field.hpp"
#include "cavbell/fock.hpp"

namespace cavbell::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

json angles_json(const fock::ChshSettings& s) {
  const auto one = [](const fock::BlochAngles& a) { return json{{"theta", a.theta}, {"phi", a.phi}}; };
  return json{{"x_a", one(s.x_a)}, {"x_b", one(s.x_b)}, {"y_a", one(s.y_a)}, {"y_b", one(s.y_b)}};
}

json complex_json(fock::cplx v) { return json::array({v.real(), v.imag()}); }

json cavity_json(const RunConfig& cfg, const modes::Grid1D& grid) {
  if (!cfg.physical_units) return json{{"units", "dimensionless"}};
  const cavity::CavityParams p = cavity::derive_params(cfg.L0, cfg.b, cfg.N_long, cfg.c);
  const cavity::SveaReport r = cavity::svea_check(p, grid);
  return json{{"units", "physical"},
              {"omega0", p.omega0},
              {"omega_tilde", p.omega_tilde},
              {"m_eff", p.m_eff},
              {"gamma_eff", p.gamma_eff},
              {"osc_length", p.osc_length},
              {"period_seconds", 2.0 * kPi / p.omega_tilde},
              {"svea", {{"frequency_ratio", r.frequency_ratio},
                        {"svea_ok", r.svea_ok},
                        {"max_parabolic_ratio", r.max_parabolic_ratio},
                        {"parabolic_ok", r.parabolic_ok},
                        {"aperture_half_width", r.aperture_half_width}}}};
}

json base_manifest(const std::string& command, const RunConfig& cfg) {
  json m;
  m["command"] = command;
  m["config"] = cfg.to_json();
  return m;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

fock::ChshSettings selected_settings(const RunConfig& cfg, const fock::ModeState2D& state) {
  switch (cfg.settings_source) {
    case SettingsSource::paper: return fock::ChshSettings::paper();
    case SettingsSource::explicit_angles: return cfg.explicit_settings;
    case SettingsSource::optimal: return fock::chsh_optimize(state).settings;
  }
  return fock::ChshSettings::identity();
}

double energy(const field::FieldGrid& f) {
  return (field::expect_grid(f, field::hamiltonian_form(), field::identity_form()).value +
          field::expect_grid(f, field::identity_form(), field::hamiltonian_form()).value)
      .real();
}

double max_coefficient_error(const fock::ModeState2D& a, const fock::ModeState2D& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::numeric: return kExitNumeric;
    case ErrorKind::ill_posed: return kExitIllPosed;
    case ErrorKind::io: return kExitIo;
  }
  return kExitIo;
}

fock::ModeState2D initial_state(const RunConfig& cfg) {
  if (!cfg.state_file.empty()) {
    std::ifstream in(cfg.state_file);
    if (!in) throw ConfigError("cannot read state file " + cfg.state_file);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("state file " + cfg.state_file + ": " + e.what());
    }
    return io::state_from_json(doc).resized(cfg.nmax).normalized();
  }
  if (cfg.state == "ground") return fock::basis_state(cfg.nmax, 0, 0);
  return fock::beamsplitter_state(cfg.nmax);
}

json cmd_chsh(const RunConfig& cfg, io::StagedOutput& out) {
  const modes::Grid1D grid(cfg.half_extent, cfg.count);
  const fock::ModeState2D state = initial_state(cfg);
  const field::FieldGrid f = field::synthesize(state, grid);
  bool boundary = false;

  const fock::SpinOps s = fock::spin_ops(cfg.nmax);
  const std::array<std::pair<const char*, const fock::OperatorMatrix*>, 3> ops{
      {{"Sx", &s.sx}, {"Sy", &s.sy}, {"Sz", &s.sz}}};
  const std::array<field::DiffOpSpec, 3> forms{field::sx_form(), field::sy_form(),
                                               field::sz_form()};
  json mode_corr;
  json grid_corr;
  double corr_dev = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const std::string key = std::string(ops[i].first) + "," + ops[j].first;
      const fock::cplx m = fock::expect(state, *ops[i].second, *ops[j].second);
      const field::GridExpectation g = field::expect_grid(f, forms[i], forms[j]);
      boundary = boundary || g.boundary_warning;
      mode_corr[key] = complex_json(m);
      grid_corr[key] = complex_json(g.value);
      corr_dev = std::max(corr_dev, std::abs(m - g.value));
    }
  }

  const fock::OperatorMatrix n = fock::number_op(cfg.nmax);
  const fock::cplx joint_mode = fock::expect(state, n, n);
  const field::GridExpectation joint_grid =
      field::expect_grid(f, field::number_form(), field::number_form());
  boundary = boundary || joint_grid.boundary_warning;

  const auto evaluate = [&](const fock::ChshSettings& st) {
    const double m = fock::chsh_value(state, st);
    const field::GridExpectation g = field::chsh_grid(f, st);
    boundary = boundary || g.boundary_warning;
    return json{{"mode", m}, {"grid", g.value.real()}, {"deviation", std::abs(m - g.value.real())}};
  };

  const fock::ChshOptimum opt = fock::chsh_optimize(state);
  json optimized = evaluate(opt.settings);
  optimized["value"] = opt.value;
  optimized["direct_value"] = opt.direct_value;
  optimized["singular_values"] = {opt.singular_values[0], opt.singular_values[1],
                                  opt.singular_values[2]};
  optimized["degenerate"] = opt.degenerate;
  optimized["settings"] = angles_json(opt.settings);

  json paper = evaluate(fock::ChshSettings::paper());
  paper["settings"] = angles_json(fock::ChshSettings::paper());
  paper["note"] =
      "ops1/ops2 as written (Sx in both y-axis observables), with Sz = 2a+a - 1 and "
      "Sx = a+(1 - a+a) + a; basis index is the excitation number";
  json variant = evaluate(fock::ChshSettings::paper_sy_variant());
  variant["settings"] = angles_json(fock::ChshSettings::paper_sy_variant());
  variant["note"] = "ops1/ops2 with Sy = i(a+(1 - a+a) - a) replacing Sx on the y-axis";

  const fock::ChshSettings chosen = selected_settings(cfg, state);
  json selected = evaluate(chosen);
  selected["source"] = to_string(cfg.settings_source);
  selected["settings"] = angles_json(chosen);

  json m = base_manifest("chsh", cfg);
  m["state"] = io::state_to_json(state);
  m["correlators"] = {{"mode", mode_corr}, {"grid", grid_corr}, {"max_abs_deviation", corr_dev}};
  m["joint_excitation"] = {{"mode", joint_mode.real()},
                           {"grid", joint_grid.value.real()},
                           {"deviation", std::abs(joint_mode - joint_grid.value)}};
  m["optimized"] = optimized;
  m["paper_quadruple"] = paper;
  m["paper_sy_variant"] = variant;
  m["selected"] = selected;
  m["tsirelson_bound"] = 2.0 * std::numbers::sqrt2;
  m["boundary_warning"] = boundary;
  m["cavity"] = cavity_json(cfg, grid);
  out.write("chsh.json", dump(m));
  return m;
}

json cmd_frames(const RunConfig& cfg, io::StagedOutput& out) {
  const modes::Grid1D grid(cfg.half_extent, cfg.count);
  const modes::Grid1D frame_grid(cfg.frame_half_extent, cfg.frame_count);
  const fock::ModeState2D state = initial_state(cfg);
  const field::FieldGrid initial = field::synthesize(state, grid);

  // Dense frames over two periods for the rotation fit.
  const int K = cfg.rate_frames;
  const double span = 4.0 * kPi / (K - 1);
  std::vector<field::FieldGrid> fit_frames;
  std::vector<double> fit_times;
  if (cfg.scheme == cavity::Scheme::mode_exact) {
    for (int k = 0; k < K; ++k) {
      fit_times.push_back(k * span);
      fit_frames.push_back(field::synthesize(cavity::evolve_modes(state, k * span), grid));
    }
  } else {
    const int per = static_cast<int>(std::ceil(span / cfg.dt - 1e-9));
    cavity::PropagatorConfig pc{span / per, per * (K - 1), cavity::Scheme::split_step,
                                cfg.allow_large_dt};
    fit_times.push_back(0.0);
    fit_frames.push_back(initial);
    cavity::evolve_splitstep(initial, pc, [&](int step, double, const Eigen::MatrixXcd& psi) {
      if (step % per == 0) {
        fit_times.push_back((step / per) * span);
        fit_frames.push_back(field::FieldGrid(grid, psi));
      }
    });
  }
  const cavity::RotationFit fit = cavity::measure_rotation_rate(fit_frames, fit_times, cfg.fit_radius);
  if (!(std::abs(fit.rate) > 0.0)) throw NumericError("nodal line does not rotate");

  const std::array<std::pair<double, const char*>, 4> phases{
      {{0.0, "0"}, {kPi / 4, "pi4"}, {3 * kPi / 4, "3pi4"}, {5 * kPi / 4, "5pi4"}}};
  std::vector<field::FieldGrid> frames;
  json frame_list = json::array();
  for (const auto& [phase, tag] : phases) {
    const double t = phase / std::abs(fit.rate);
    fock::ModeState2D at = cavity::evolve_modes(state, t);
    if (cfg.scheme == cavity::Scheme::split_step && t > 0.0) {
      const int n = static_cast<int>(std::ceil(t / cfg.dt - 1e-9));
      const cavity::PropagatorConfig pc{t / n, n, cavity::Scheme::split_step, cfg.allow_large_dt};
      at = field::project(cavity::evolve_splitstep(initial, pc), cfg.nmax).state;
    }
    frames.push_back(field::synthesize(at, frame_grid));
    const std::string file = std::string("frames/frame_phase_") + tag + ".csv";
    out.write(file, io::frame_csv(frames.back()));
    frame_list.push_back({{"phase", phase}, {"time", t}, {"file", file}});
  }

  const double direction = fit.rate > 0.0 ? 1.0 : -1.0;
  const double radius = frame_grid.last();
  json mismatch;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    mismatch[std::string(phases[k].second)] =
        cavity::rotation_mismatch(frames[0], frames[k], direction * phases[k].first, radius);
  }

  json m = base_manifest("frames", cfg);
  m["scheme"] = to_string(cfg.scheme);
  m["frames"] = frame_list;
  m["rotation"] = {
      {"rate", fit.rate},
      {"rate_over_omega_tilde", std::abs(fit.rate)},
      {"direction", direction > 0 ? "counter-clockwise" : "clockwise"},
      {"residual_rad", fit.residual},
      {"fit_frames", K},
      {"fit_span", fit_times.back()},
      {"candidate_rates", {{"paper_phase_convention", 1.0}, {"schrodinger_mode_phases", 2.0}}},
      {"closest_candidate", std::abs(std::abs(fit.rate) - 1.0) < std::abs(std::abs(fit.rate) - 2.0)
                                ? "paper_phase_convention"
                                : "schrodinger_mode_phases"}};
  m["rotation_mismatch"] = mismatch;
  m["rotation_mismatch_radius"] = radius;
  m["cavity"] = cavity_json(cfg, grid);
  out.write("frames.json", dump(m));
  return m;
}

json cmd_evolve(const RunConfig& cfg, io::StagedOutput& out) {
  const modes::Grid1D grid(cfg.half_extent, cfg.count);
  const fock::ModeState2D state = initial_state(cfg);
  const field::FieldGrid initial = field::synthesize(state, grid);
  const cavity::PropagatorConfig pc{cfg.dt, cfg.steps, cfg.scheme, cfg.allow_large_dt};
  const double t = cfg.dt * cfg.steps;

  const field::FieldGrid final_field = cavity::evolve(initial, pc, cfg.nmax);
  const field::Projection proj = field::project(final_field, cfg.nmax);
  const fock::ModeState2D expected = cavity::evolve_modes(state, t);

  json m = base_manifest("evolve", cfg);
  m["scheme"] = to_string(cfg.scheme);
  m["time"] = t;
  m["periods"] = t / (2.0 * kPi);
  m["coefficient_error"] = max_coefficient_error(proj.state, expected);
  m["truncation_loss"] = proj.truncation_loss;
  const double n0 = field::norm(initial);
  const double n1 = field::norm(final_field);
  m["norm_initial"] = n0;
  m["norm_final"] = n1;
  m["norm_drift"] = std::abs(n1 - n0);
  const double e0 = energy(initial);
  const double e1 = energy(final_field);
  m["energy_initial"] = e0;
  m["energy_final"] = e1;
  m["energy_drift"] = std::abs(e1 - e0);
  m["boundary_amplitude"] = field::boundary_amplitude(final_field);
  m["final_state"] = io::state_to_json(proj.state);
  m["final_frame"] = "evolve_final.csv";
  m["cavity"] = cavity_json(cfg, grid);
  out.write("evolve_final.csv", io::frame_csv(final_field));
  out.write("evolve.json", dump(m));
  return m;
}

json cmd_sample(const RunConfig& cfg, io::StagedOutput& out) {
  const modes::Grid1D grid(cfg.half_extent, cfg.count);
  const fock::ModeState2D state = initial_state(cfg);
  const field::FieldGrid f = field::synthesize(state, grid);
  const fock::ModeState2D truth = state.resized(cfg.sample_nmax).normalized();

  antenna::StudyOptions opts;
  opts.layout = cfg.layout;
  opts.aperture = cfg.aperture;
  opts.nmax = cfg.sample_nmax;
  opts.seed = cfg.sample_seed;
  opts.settings = selected_settings(cfg, truth);

  json noiseless = json::array();
  for (int M : cfg.M_list) {
    const antenna::SamplePlan plan = antenna::make_plan(cfg.layout, M, cfg.aperture, cfg.sample_seed, grid);
    const antenna::Reconstruction rec =
        antenna::reconstruct(antenna::sample(f, plan, 0.0), cfg.sample_nmax, plan.describe());
    noiseless.push_back({{"M", M},
                         {"condition_number", rec.condition_number},
                         {"max_coefficient_error", max_coefficient_error(rec.state, truth)}});
  }

  const antenna::ConvergenceReport report =
      antenna::convergence_study(f, cfg.M_list, cfg.sample_noise, cfg.trials, opts);
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"M", r.M}, {"trials", r.trials}, {"mean_error", r.mean_error}};
    row["std_error"] = r.std_error ? json(*r.std_error) : json(nullptr);
    row["mean_condition_number"] = r.mean_condition;
    rows.push_back(row);
  }

  // The violation check always uses the best settings for the state; other sources may sit at zero.
  antenna::StudyOptions vopts = opts;
  vopts.settings = fock::chsh_optimize(truth).settings;
  const antenna::ViolationStudy violation =
      antenna::violation_study(f, cfg.violation_M, cfg.violation_noise, cfg.violation_seeds, vopts);

  json m = base_manifest("sample", cfg);
  m["settings_source"] = to_string(cfg.settings_source);
  m["settings"] = angles_json(opts.settings);
  m["noiseless"] = noiseless;
  m["convergence"] = {{"oracle", report.oracle},
                      {"noise_sigma", report.noise_sigma},
                      {"rows", rows},
                      {"slope", report.slope ? json(*report.slope) : json(nullptr)}};
  m["violation"] = {{"settings", angles_json(vopts.settings)},
                    {"M", cfg.violation_M},
                    {"noise_sigma", cfg.violation_noise},
                    {"seeds", cfg.violation_seeds},
                    {"mean", violation.mean},
                    {"percentile05", violation.percentile05},
                    {"violates_classical_bound", violation.percentile05 > 2.0},
                    {"estimates", violation.estimates}};
  m["cavity"] = cavity_json(cfg, grid);
  out.write("sample.json", dump(m));
  return m;
}

json cmd_collapse(const RunConfig& cfg, io::StagedOutput& out) {
  const fock::ModeState2D state = initial_state(cfg);
  const antenna::CollapseStatistics stats =
      antenna::collapse_statistics(state, cfg.collapse, cfg.collapse_runs);
  json runs = json::array();
  for (std::size_t k = 0; k < stats.runs.size(); ++k) {
    const antenna::CollapseRun& r = stats.runs[k];
    std::ostringstream name;
    name << "trajectories/run_" << std::setw(4) << std::setfill('0') << k << ".csv";
    out.write(name.str(), io::trajectory_csv(r.trajectory));
    const auto& last = r.trajectory.back();
    int ties = 0;
    for (const auto& p : r.trajectory) ties += p.tie ? 1 : 0;
    runs.push_back({{"run", k},
                    {"outcome", antenna::to_string(r.outcome)},
                    {"steps", last.step},
                    {"parity_x", last.parity_x},
                    {"parity_y", last.parity_y},
                    {"fidelity_01", last.fidelity_01},
                    {"fidelity_10", last.fidelity_10},
                    {"ties", ties},
                    {"file", name.str()}});
  }
  json m = base_manifest("collapse", cfg);
  m["fractions"] = {{"zero_one", stats.fraction_zero_one},
                    {"one_zero", stats.fraction_one_zero},
                    {"none", stats.fraction_none}};
  m["runs"] = runs;
  out.write("collapse.json", dump(m));
  return m;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classical cavity entanglement simulator"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string scheme;
  std::string settings;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed for sampling and collapse studies");
  app.add_option("--scheme", scheme, "propagator scheme")->check(CLI::IsMember({"mode", "splitstep"}));
  app.add_option("--settings", settings, "CHSH settings source")
      ->check(CLI::IsMember({"paper", "optimal"}));
  app.add_option("--set", overrides, "extra key=value overrides");
  for (const char* name : {"chsh", "frames", "evolve", "sample", "collapse"}) {
    app.add_subcommand(name)->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) {
      cfg.sample_seed = *seed;
      cfg.collapse.seed = *seed;
    }
    if (!scheme.empty()) apply_setting(cfg, "propagator.scheme", scheme);
    if (!settings.empty()) apply_setting(cfg, "chsh.settings", settings);
    cfg.validate();

    io::StagedOutput staged(cfg.out_dir);
    json manifest;
    if (command == "chsh") manifest = cmd_chsh(cfg, staged);
    else if (command == "frames") manifest = cmd_frames(cfg, staged);
    else if (command == "evolve") manifest = cmd_evolve(cfg, staged);
    else if (command == "sample") manifest = cmd_sample(cfg, staged);
    else manifest = cmd_collapse(cfg, staged);
    for (const auto& path : staged.commit()) out << path.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace cavbell::cli
