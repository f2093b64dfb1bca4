#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavbell/cli/config.hpp"
#include "cavbell/error.hpp"
#include "cavbell/io.hpp"

namespace cavbell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIllPosed = 4;

int exit_code_for(ErrorKind kind);

/// The configured initial state at cutoff cfg.nmax.
fock::ModeState2D initial_state(const RunConfig& cfg);

// Each command stages its files in `out` and returns the manifest it wrote.
nlohmann::ordered_json cmd_chsh(const RunConfig& cfg, io::StagedOutput& out);
nlohmann::ordered_json cmd_frames(const RunConfig& cfg, io::StagedOutput& out);
nlohmann::ordered_json cmd_evolve(const RunConfig& cfg, io::StagedOutput& out);
nlohmann::ordered_json cmd_sample(const RunConfig& cfg, io::StagedOutput& out);
nlohmann::ordered_json cmd_collapse(const RunConfig& cfg, io::StagedOutput& out);

/// Full entry point: parses arguments, loads and validates the config, runs
/// the subcommand and commits outputs. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cavbell::cli
