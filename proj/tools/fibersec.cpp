#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fibersec/commands.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "base seed override");
  cmd->add_option("--trials", opts.trials, "trials-per-cell override");
}

fibersec::ExperimentConfig load_with_overrides(const CommonOptions& opts) {
  fibersec::ExperimentConfig cfg =
      fibersec::load_experiment_config(opts.config_path);
  if (opts.seed) cfg.sweep.base_seed = *opts.seed;
  if (opts.trials) cfg.sweep.trials = *opts.trials;
  return cfg;
}

std::filesystem::path resolve_out_dir(const CommonOptions& opts,
                                      const fibersec::ExperimentConfig& cfg) {
  return opts.out_dir.empty() ? std::filesystem::path(cfg.output.directory)
                              : std::filesystem::path(opts.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimode-fiber physical-layer-security simulator"};
  app.require_subcommand(1);

  CommonOptions modes_opts, tmgen_opts, sweep_opts, secure_opts, mdm_opts;

  CLI::App* modes = app.add_subcommand("modes", "solve and report the LP mode basis");
  add_common(modes, modes_opts);

  CLI::App* tmgen = app.add_subcommand("tm-gen", "synthesize a transmission-matrix file");
  add_common(tmgen, tmgen_opts);

  CLI::App* sweep = app.add_subcommand("sweep", "run the channel x noise-level sweep");
  add_common(sweep, sweep_opts);

  CLI::App* secure = app.add_subcommand("secure", "report the secure channel set");
  add_common(secure, secure_opts);
  double noise_level = 0.5, eve_fail_min = 0.99, bob_success_min = 0.99;
  std::string secure_csv;
  secure->add_option("--noise-level", noise_level, "noise level to evaluate");
  secure->add_option("--eve-fail-min", eve_fail_min, "required Eve failure rate");
  secure->add_option("--bob-success-min", bob_success_min, "required Bob success rate");
  secure->add_option("--csv", secure_csv, "reuse an existing sweep CSV");

  CLI::App* mdm = app.add_subcommand("mdm", "fixed multi-channel message trace");
  add_common(mdm, mdm_opts);
  std::vector<int> channels;
  std::string bits;
  mdm->add_option("--channels", channels, "channel labels, 1-based")
      ->required()
      ->delimiter(',');
  mdm->add_option("--bits", bits, "binary message, one bit per channel");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*modes) {
      const auto cfg = load_with_overrides(modes_opts);
      fibersec::cmd_modes(cfg, resolve_out_dir(modes_opts, cfg), std::cout);
    } else if (*tmgen) {
      const auto cfg = load_with_overrides(tmgen_opts);
      fibersec::cmd_tm_gen(cfg, resolve_out_dir(tmgen_opts, cfg), std::cout);
    } else if (*sweep) {
      const auto cfg = load_with_overrides(sweep_opts);
      fibersec::cmd_sweep(cfg, resolve_out_dir(sweep_opts, cfg), std::cout);
    } else if (*secure) {
      const auto cfg = load_with_overrides(secure_opts);
      std::optional<std::filesystem::path> csv;
      if (!secure_csv.empty()) csv = secure_csv;
      fibersec::cmd_secure(cfg, resolve_out_dir(secure_opts, cfg), noise_level,
                           eve_fail_min, bob_success_min, csv, std::cout);
    } else if (*mdm) {
      const auto cfg = load_with_overrides(mdm_opts);
      fibersec::cmd_mdm(cfg, resolve_out_dir(mdm_opts, cfg), channels, bits,
                        std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
