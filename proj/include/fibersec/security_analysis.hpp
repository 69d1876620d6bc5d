#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fibersec/channel_model.hpp"

namespace fibersec {

/// Sentinel for failed detection; serializes as "-inf".
inline constexpr double kFailedSnr = -std::numeric_limits<double>::infinity();

/// Cap applied when the background power is exactly zero.
inline constexpr double kSnrCapDb = 200.0;

/// Detection SNR in dB: mean |y_i|^2 over the signal set against the mean
/// over its complement. signal_set uses 0-based indices.
double snr_db(const ComplexVector& y, const std::vector<int>& signal_set,
              double cap_db = kSnrCapDb);

/// Indices of the k largest magnitudes, ties broken toward the lower
/// index; result sorted ascending.
std::vector<int> detect_topk(const ComplexVector& y, int k);

/// Indices with |y_i| >= tau, ascending.
std::vector<int> detect_threshold(const ComplexVector& y, double tau);

/// Multi-channel symbol: k distinct active channels carrying equal complex
/// weights of magnitude 1/sqrt(k), unit total power before precoding.
struct MdmMessage {
  std::vector<int> active_channels;  // 0-based, distinct

  int size() const { return static_cast<int>(active_channels.size()); }
  void validate(int dimension) const;
  ComplexVector to_vector(int dimension) const;
};

struct DetectionResult {
  std::vector<int> detected_channels;
  bool success = false;
  double snr_db = kFailedSnr;
};

struct TrialResult {
  DetectionResult bob;
  DetectionResult eve;
};

/// One full link trial: build the message vector, precode with artificial
/// noise, observe on both sides, detect top-k (k = message size) and score
/// the SNR over the sent set; failed detection yields the -inf sentinel.
/// Sub-seeds for the artificial noise and the two receivers derive
/// deterministically from the trial seed.
TrialResult run_trial(const PreparedLink& link, const MdmMessage& message,
                      Seed seed);
TrialResult run_trial(const LinkConfig& link, const MdmMessage& message,
                      Seed seed);

/// run_trial with the artificial-noise level overridden (used by sweeps).
TrialResult run_trial_at_level(const PreparedLink& link,
                               const MdmMessage& message, double noise_level,
                               Seed seed);

/// Gridded Monte-Carlo results over channels x noise levels. Channel labels
/// are 1-based to match report conventions; grids are row-major with the
/// level index fastest. Mean SNRs average the dB values of successful
/// trials only and carry the -inf sentinel where the majority of trials
/// failed detection.
struct SweepReport {
  std::vector<int> channels;
  std::vector<double> noise_levels;
  std::vector<double> bob_mean_snr_db;
  std::vector<double> eve_mean_snr_db;
  std::vector<double> bob_success_rate;
  std::vector<double> eve_success_rate;
  int trials_per_cell = 0;
  Seed base_seed = 0;

  std::size_t cell(int channel_pos, int level_pos) const {
    return static_cast<std::size_t>(channel_pos) * noise_levels.size() +
           static_cast<std::size_t>(level_pos);
  }
  std::optional<int> level_position(double noise_level) const;
};

/// Single-channel trials for every channel at the link's configured
/// artificial-noise level.
SweepReport channel_sweep(const LinkConfig& link, int trials, Seed seed);

/// Full grid over channels x noise levels; per-cell seeds derive from
/// (base seed, channel label, level bits, trial index), so parallel and
/// serial execution produce identical reports.
SweepReport noise_sweep(const LinkConfig& link,
                        const std::vector<double>& noise_levels, int trials,
                        Seed seed, int threads = 0);

/// Channels (1-based labels) where Eve's failure rate reaches eve_fail_min
/// while Bob's success rate reaches bob_success_min at the given noise
/// level. Throws if the level is not in the report, listing the available
/// levels.
std::vector<int> secure_channels(const SweepReport& report, double noise_level,
                                 double eve_fail_min = 0.99,
                                 double bob_success_min = 0.99);

/// Ordered symbol count n * (n-1) * ... * (n-k+1).
std::uint64_t mdm_symbol_count(int n, int k);

/// Noise-level traces for one fixed multi-channel message.
struct MdmTrace {
  MdmMessage message;
  std::vector<double> noise_levels;
  std::vector<double> bob_success_rate;
  std::vector<double> eve_success_rate;
  std::vector<double> bob_mean_snr_db;
  std::vector<double> eve_mean_snr_db;
  int trials_per_level = 0;
  Seed base_seed = 0;
  /// Smallest level at which Eve's success drops below 1 - eve_fail_min
  /// while Bob's stays at or above bob_success_min.
  std::optional<double> min_secure_level;
};

MdmTrace secure_mdm_trial(const LinkConfig& link, const MdmMessage& message,
                          const std::vector<double>& noise_levels, int trials,
                          Seed seed, double eve_fail_min = 0.99,
                          double bob_success_min = 0.99);

/// CSV schema: one row per (channel, noise_level, side) with columns
/// channel, noise_level, side, mean_snr_db (3 decimals, "-inf" for the
/// failure sentinel), success_rate, trials. A leading comment line carries
/// the base seed so a parsed report is complete.
std::string sweep_to_csv(const SweepReport& report);
SweepReport sweep_from_csv(const std::string& text);
void save_sweep_csv(const std::filesystem::path& path,
                    const SweepReport& report);
SweepReport load_sweep_csv(const std::filesystem::path& path);

}  // namespace fibersec
