#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fibersec/channel_model.hpp"
#include "fibersec/fiber_modes.hpp"
#include "fibersec/matrix_core.hpp"

namespace fibersec {

/// Sub-stream tag for the measurement-noise draw on a synthesized matrix,
/// shared by tm-gen and the link assembly so both produce the same bits.
inline constexpr std::uint64_t kMeasurementSeedTag = 0x6d656173;

/// Source of the Alice-Bob transmission matrix: synthesized (haar or
/// coupled) or loaded from a matrix file.
struct MatrixSource {
  std::string source = "haar";  // haar | coupled | file
  int dimension = 0;            // 0 = use the solved mode count
  double epsilon = 0.5;         // coupled mixing strength
  Seed seed = 1;
  std::string path;             // matrix file for source = file
  double measurement_noise = 0.0;  // emulate_measurement sigma on T_AB

  std::string eve_source = "same-as-bob";  // same-as-bob | independent-haar | file
  Seed eve_seed = 2;
  std::string eve_path;
};

struct TapSettings {
  double rho = 0.8;
  double sigma_sq_min = 0.0028;
};

struct LinkSettings {
  double receiver_noise_std = 0.01;
  AlphaRule alpha_rule = AlphaRule::auto_scaled();
  double artificial_noise_level = 0.5;
};

struct SweepSettings {
  std::vector<double> noise_levels = {0.0, 0.25, 0.5, 0.75, 1.0};
  int trials = 200;
  Seed base_seed = 42;
  int threads = 0;  // 0 = hardware concurrency
};

struct OutputSettings {
  std::string directory = "out";
  bool svg = true;
};

/// Full experiment description; one JSON document with explicit seeds, so
/// every command is reproducible from the config alone.
struct ExperimentConfig {
  FiberSpec fiber;
  MatrixSource matrix;
  TapSettings tap;
  LinkSettings link;
  SweepSettings sweep;
  OutputSettings output;

  void validate(const std::filesystem::path& base_dir = ".") const;
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);

/// Loads, parses and validates; referenced files are resolved against the
/// config file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Assembles the full Alice-Bob-Eve link from a config: solves the mode
/// basis, builds the tap profile from edge-power fractions and synthesizes
/// or loads the transmission matrices.
struct AssembledLink {
  ModeBasis basis;
  LinkConfig link;
};
AssembledLink assemble_link(const ExperimentConfig& config,
                            const std::filesystem::path& base_dir = ".");

}  // namespace fibersec
