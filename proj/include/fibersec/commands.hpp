#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fibersec/experiment_config.hpp"
#include "fibersec/security_analysis.hpp"

namespace fibersec {

/// Command implementations behind the CLI subcommands. Every command is
/// deterministic given its config, writes outputs atomically (temp +
/// rename) and throws on any failure; the returned paths are the files
/// written.

/// Solves the mode basis and writes the mode table (modes.json).
std::vector<std::filesystem::path> cmd_modes(const ExperimentConfig& config,
                                             const std::filesystem::path& out_dir,
                                             std::ostream& log);

/// Synthesizes the transmission matrix file(s) (tm_ab.json, and tm_ae.json
/// when Eve's channel is independent).
std::vector<std::filesystem::path> cmd_tm_gen(const ExperimentConfig& config,
                                              const std::filesystem::path& out_dir,
                                              std::ostream& log);

/// Runs the noise sweep and writes sweep.csv plus optional SVG heatmaps
/// (sweep_bob.svg, sweep_eve.svg) on a shared color scale.
std::vector<std::filesystem::path> cmd_sweep(const ExperimentConfig& config,
                                             const std::filesystem::path& out_dir,
                                             std::ostream& log);

/// Emits the secure-channel set (secure.json) at the requested noise level.
/// Reuses an existing sweep CSV when given, otherwise runs the sweep.
std::vector<std::filesystem::path> cmd_secure(
    const ExperimentConfig& config, const std::filesystem::path& out_dir,
    double noise_level, double eve_fail_min, double bob_success_min,
    const std::optional<std::filesystem::path>& csv_path, std::ostream& log);

/// Runs the fixed-message noise trace for channels given with 1-based
/// labels; bits selects the transmitted subset ("111" sends on all three).
/// Writes mdm.json.
std::vector<std::filesystem::path> cmd_mdm(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir,
                                           const std::vector<int>& channels,
                                           const std::string& bits,
                                           std::ostream& log);

}  // namespace fibersec
