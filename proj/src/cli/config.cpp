#include "cavbell/cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "cavbell/error.hpp"
#include "cavbell/field.hpp"

namespace cavbell::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long n = to_integer(key, v);
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": value out of range");
  }
  return static_cast<int>(n);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream s(v);
  std::string item;
  while (std::getline(s, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

std::string to_string(SettingsSource s) {
  switch (s) {
    case SettingsSource::paper: return "paper";
    case SettingsSource::optimal: return "optimal";
    case SettingsSource::explicit_angles: return "explicit";
  }
  return "optimal";
}

std::string to_string(cavity::Scheme s) {
  return s == cavity::Scheme::mode_exact ? "mode" : "splitstep";
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "grid.half_extent") cfg.half_extent = to_double(key, v);
  else if (key == "grid.count") cfg.count = to_int(key, v);
  else if (key == "nmax") cfg.nmax = to_int(key, v);
  else if (key == "state") cfg.state = v;
  else if (key == "state.file") cfg.state_file = v;
  else if (key == "cavity.units") {
    if (v == "dimensionless") cfg.physical_units = false;
    else if (v == "physical") cfg.physical_units = true;
    else throw ConfigError(key + ": expected dimensionless or physical");
  } else if (key == "cavity.L0") cfg.L0 = to_double(key, v);
  else if (key == "cavity.b") cfg.b = to_double(key, v);
  else if (key == "cavity.N_long") cfg.N_long = to_int(key, v);
  else if (key == "cavity.c") cfg.c = to_double(key, v);
  else if (key == "propagator.scheme") {
    if (v == "mode") cfg.scheme = cavity::Scheme::mode_exact;
    else if (v == "splitstep") cfg.scheme = cavity::Scheme::split_step;
    else throw ConfigError(key + ": expected mode or splitstep");
  } else if (key == "propagator.dt") cfg.dt = to_double(key, v);
  else if (key == "propagator.steps") cfg.steps = to_int(key, v);
  else if (key == "propagator.allow_large_dt") cfg.allow_large_dt = to_bool(key, v);
  else if (key == "chsh.settings") {
    if (v == "paper") cfg.settings_source = SettingsSource::paper;
    else if (v == "optimal") cfg.settings_source = SettingsSource::optimal;
    else if (v == "explicit") cfg.settings_source = SettingsSource::explicit_angles;
    else throw ConfigError(key + ": expected paper, optimal or explicit");
  } else if (key == "chsh.angles") {
    const auto items = split_list(v);
    if (items.size() != 8) {
      throw ConfigError(key + ": expected 8 angles (theta, phi for x_a, x_b, y_a, y_b)");
    }
    std::array<double, 8> a{};
    for (std::size_t k = 0; k < 8; ++k) a[k] = to_double(key, items[k]);
    cfg.explicit_settings = {{a[0], a[1]}, {a[2], a[3]}, {a[4], a[5]}, {a[6], a[7]}};
  } else if (key == "sampling.layout") cfg.layout = antenna::layout_from_string(v);
  else if (key == "sampling.M_list") {
    cfg.M_list.clear();
    for (const auto& item : split_list(v)) cfg.M_list.push_back(to_int(key, item));
  } else if (key == "sampling.noise_sigma") cfg.sample_noise = to_double(key, v);
  else if (key == "sampling.trials") cfg.trials = to_int(key, v);
  else if (key == "sampling.M") cfg.violation_M = to_int(key, v);
  else if (key == "sampling.violation_noise_sigma") cfg.violation_noise = to_double(key, v);
  else if (key == "sampling.violation_seeds") cfg.violation_seeds = to_int(key, v);
  else if (key == "sampling.nmax") cfg.sample_nmax = to_int(key, v);
  else if (key == "sampling.aperture") cfg.aperture = to_double(key, v);
  else if (key == "sampling.seed") cfg.sample_seed = to_u64(key, v);
  else if (key == "collapse.gain") cfg.collapse.gain = to_double(key, v);
  else if (key == "collapse.noise_sigma") cfg.collapse.noise_sigma = to_double(key, v);
  else if (key == "collapse.threshold") cfg.collapse.threshold = to_double(key, v);
  else if (key == "collapse.max_steps") cfg.collapse.max_steps = to_int(key, v);
  else if (key == "collapse.runs") cfg.collapse_runs = to_int(key, v);
  else if (key == "collapse.seed") cfg.collapse.seed = to_u64(key, v);
  else if (key == "collapse.axis") cfg.collapse.axis = antenna::feedback_axis_from_string(v);
  else if (key == "frames.half_extent") cfg.frame_half_extent = to_double(key, v);
  else if (key == "frames.count") cfg.frame_count = to_int(key, v);
  else if (key == "frames.rate_frames") cfg.rate_frames = to_int(key, v);
  else if (key == "frames.fit_radius") cfg.fit_radius = to_double(key, v);
  else if (key == "output.dir") cfg.out_dir = v;
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

void RunConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(half_extent > 0.0)) fail("grid.half_extent must be positive");
  if (count <= 0 || count % 2 != 0) fail("grid.count must be a positive even integer");
  if (nmax < 1) fail("nmax must be at least 1");
  if (count < field::min_count_for(nmax)) fail("grid.count too small to resolve nmax");
  if (state_file.empty() && state != "entangled" && state != "ground") {
    fail("state must be entangled or ground (or set state.file)");
  }
  if (physical_units) cavity::derive_params(L0, b, N_long, c);
  if (!(dt > 0.0)) fail("propagator.dt must be positive");
  if (steps < 0) fail("propagator.steps must be nonnegative");
  if (dt > cavity::kMaxDefaultDt && !allow_large_dt) {
    fail("propagator.dt exceeds 0.1; set propagator.allow_large_dt = true to override");
  }
  if (M_list.empty()) fail("sampling.M_list must not be empty");
  if (!std::is_sorted(M_list.begin(), M_list.end())) fail("sampling.M_list must be ascending");
  if (sample_nmax < 1) fail("sampling.nmax must be at least 1");
  const int unknowns = (sample_nmax + 1) * (sample_nmax + 1);
  if (M_list.front() < unknowns || violation_M < unknowns) {
    fail("sampling M values must be >= (sampling.nmax+1)^2 = " + std::to_string(unknowns));
  }
  if (!(sample_noise >= 0.0) || !(violation_noise >= 0.0)) fail("sampling noise must be >= 0");
  if (trials < 1 || violation_seeds < 1) fail("sampling trials and seeds must be >= 1");
  if (!(aperture > 0.0) || aperture >= half_extent) fail("sampling.aperture must lie inside the grid");
  collapse.validate();
  if (collapse_runs < 1) fail("collapse.runs must be >= 1");
  if (!(frame_half_extent > 0.0) || frame_count <= 0 || frame_count % 2 != 0) {
    fail("frames.half_extent must be positive and frames.count a positive even integer");
  }
  if (rate_frames < 4) fail("frames.rate_frames must be >= 4");
  if (!(fit_radius > 0.0) || fit_radius >= frame_half_extent) {
    fail("frames.fit_radius must be positive and inside the frame grid");
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["grid.half_extent"] = half_extent;
  j["grid.count"] = count;
  j["nmax"] = nmax;
  j["state"] = state;
  j["state.file"] = state_file;
  j["cavity.units"] = physical_units ? "physical" : "dimensionless";
  j["cavity.L0"] = L0;
  j["cavity.b"] = b;
  j["cavity.N_long"] = N_long;
  j["cavity.c"] = c;
  j["propagator.scheme"] = to_string(scheme);
  j["propagator.dt"] = dt;
  j["propagator.steps"] = steps;
  j["propagator.allow_large_dt"] = allow_large_dt;
  j["chsh.settings"] = to_string(settings_source);
  const auto& e = explicit_settings;
  j["chsh.angles"] = {e.x_a.theta, e.x_a.phi, e.x_b.theta, e.x_b.phi,
                      e.y_a.theta, e.y_a.phi, e.y_b.theta, e.y_b.phi};
  j["sampling.layout"] = antenna::to_string(layout);
  j["sampling.M_list"] = M_list;
  j["sampling.noise_sigma"] = sample_noise;
  j["sampling.trials"] = trials;
  j["sampling.M"] = violation_M;
  j["sampling.violation_noise_sigma"] = violation_noise;
  j["sampling.violation_seeds"] = violation_seeds;
  j["sampling.nmax"] = sample_nmax;
  j["sampling.aperture"] = aperture;
  j["sampling.seed"] = sample_seed;
  j["collapse.gain"] = collapse.gain;
  j["collapse.noise_sigma"] = collapse.noise_sigma;
  j["collapse.threshold"] = collapse.threshold;
  j["collapse.max_steps"] = collapse.max_steps;
  j["collapse.runs"] = collapse_runs;
  j["collapse.seed"] = collapse.seed;
  j["collapse.axis"] = antenna::to_string(collapse.axis);
  j["frames.half_extent"] = frame_half_extent;
  j["frames.count"] = frame_count;
  j["frames.rate_frames"] = rate_frames;
  j["frames.fit_radius"] = fit_radius;
  j["output.dir"] = out_dir.string();
  return j;
}

}  // namespace cavbell::cli
