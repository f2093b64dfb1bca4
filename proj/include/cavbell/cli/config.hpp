#pragma once

// Run configuration: `key = value` lines with `#` comments, overridden by
// command-line flags, validated before any computation starts.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavbell/antenna.hpp"
#include "cavbell/cavity.hpp"
#include "cavbell/fock.hpp"

namespace cavbell::cli {

enum class SettingsSource { paper, optimal, explicit_angles };

struct RunConfig {
  // grid
  double half_extent = 8.0;
  int count = 256;
  int nmax = 8;

  // initial state: "entangled", "ground", or loaded from state_file
  std::string state = "entangled";
  std::string state_file;

  // cavity; physical units only affect reported conversions and SVEA checks
  bool physical_units = false;
  double L0 = 5e-6;
  double b = 1e2;
  int N_long = 10;
  double c = cavity::kSpeedOfLight;

  // propagator
  cavity::Scheme scheme = cavity::Scheme::split_step;
  double dt = 2.0 * 3.14159265358979323846 / 2000.0;
  int steps = 2000;
  bool allow_large_dt = false;

  // chsh
  SettingsSource settings_source = SettingsSource::optimal;
  fock::ChshSettings explicit_settings;

  // sampling
  antenna::Layout layout = antenna::Layout::uniform_grid;
  std::vector<int> M_list = {64, 144, 256, 576, 1024, 2304};
  double sample_noise = 0.05;
  int trials = 100;
  int violation_M = 400;
  double violation_noise = 0.02;
  int violation_seeds = 100;
  int sample_nmax = 3;
  double aperture = 4.0;
  std::uint64_t sample_seed = 20140101;

  // collapse
  antenna::CollapseConfig collapse;
  int collapse_runs = 200;

  // frames
  double frame_half_extent = 4.0;
  int frame_count = 512;
  int rate_frames = 64;
  double fit_radius = 2.0;

  std::filesystem::path out_dir = "out";

  /// Throws ConfigError naming the first violated precondition.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Parses `key = value` text. Unknown keys and bad values throw ConfigError
/// with the line number.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies one `key = value` assignment.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

std::string to_string(SettingsSource s);
std::string to_string(cavity::Scheme s);

}  // namespace cavbell::cli
