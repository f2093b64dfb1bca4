#pragma once

// File contracts shared with downstream plotting: field frames and
// trajectories as CSV, states and reports as JSON.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavbell/antenna.hpp"
#include "cavbell/field.hpp"
#include "cavbell/fock.hpp"

namespace cavbell::io {

/// Shortest round-trip-safe text with 17 significant digits.
std::string format_double(double v);

/// {"nmax": n, "coeffs": [[re, im], ...]} with coefficients row-major (nx outer).
nlohmann::ordered_json state_to_json(const fock::ModeState2D& state);
/// Throws ConfigError on a malformed document.
fock::ModeState2D state_from_json(const nlohmann::json& doc);

/// Header `x,y,re,im`, one row per node, x index outer.
void write_frame_csv(std::ostream& out, const field::FieldGrid& frame);
std::string frame_csv(const field::FieldGrid& frame);
/// Rebuilds the grid from the unique coordinates. Errors name the row.
field::FieldGrid read_frame_csv(std::istream& in);

/// Header `step,parity_x,parity_y,fidelity_01,fidelity_10`.
std::string trajectory_csv(const std::vector<antenna::TrajectoryPoint>& trajectory);

/// Files written under a hidden staging directory and moved into place
/// only on commit(); an uncommitted stage is deleted on destruction.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path out_dir);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  void write(const std::string& relative_path, const std::string& content);
  /// Renames each staged file into out_dir. Returns final paths.
  std::vector<std::filesystem::path> commit();

 private:
  std::filesystem::path out_dir_;
  std::filesystem::path stage_dir_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

}  // namespace cavbell::io
