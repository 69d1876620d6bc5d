#include "fibersec/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "fibersec/svg_heatmap.hpp"

namespace fibersec {

namespace {

using nlohmann::json;

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

json snr_trace_to_json(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) {
    if (v == kFailedSnr) arr.push_back("-inf");
    else arr.push_back(v);
  }
  return arr;
}

}  // namespace

std::vector<std::filesystem::path> cmd_modes(const ExperimentConfig& config,
                                             const std::filesystem::path& out_dir,
                                             std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  const ModeBasis basis = solve_modes(config.fiber);
  const std::filesystem::path path = out_dir / "modes.json";
  save_mode_report(path, basis, config.tap.rho);
  log << "modes: " << basis.size() << " guided modes (V = "
      << v_number(config.fiber) << "), report written to " << path.string()
      << "\n";
  return {path};
}

std::vector<std::filesystem::path> cmd_tm_gen(const ExperimentConfig& config,
                                              const std::filesystem::path& out_dir,
                                              std::ostream& log) {
  config.validate();
  if (config.matrix.source == "file")
    throw std::invalid_argument("tm-gen: matrix.source is 'file'; nothing to generate");
  std::filesystem::create_directories(out_dir);

  int n = config.matrix.dimension;
  if (n <= 0) n = solve_modes(config.fiber).size();

  ComplexMatrix t_ab = config.matrix.source == "haar"
                           ? haar_unitary(n, config.matrix.seed)
                           : coupled_unitary(n, config.matrix.epsilon,
                                             config.matrix.seed);
  if (config.matrix.measurement_noise > 0.0)
    t_ab = emulate_measurement(t_ab, config.matrix.measurement_noise,
                               derive_seed(config.matrix.seed, kMeasurementSeedTag));

  std::vector<std::filesystem::path> written;
  const std::filesystem::path ab_path = out_dir / "tm_ab.json";
  save_matrix(ab_path, t_ab);
  written.push_back(ab_path);
  log << "tm-gen: wrote " << n << "x" << n << " matrix to " << ab_path.string()
      << "\n";

  if (config.matrix.eve_source == "independent-haar") {
    const std::filesystem::path ae_path = out_dir / "tm_ae.json";
    save_matrix(ae_path, haar_unitary(n, config.matrix.eve_seed));
    written.push_back(ae_path);
    log << "tm-gen: wrote independent Eve matrix to " << ae_path.string() << "\n";
  }
  return written;
}

std::vector<std::filesystem::path> cmd_sweep(const ExperimentConfig& config,
                                             const std::filesystem::path& out_dir,
                                             std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  const AssembledLink assembled = assemble_link(config);
  const SweepReport report =
      noise_sweep(assembled.link, config.sweep.noise_levels, config.sweep.trials,
                  config.sweep.base_seed, config.sweep.threads);

  std::vector<std::filesystem::path> written;
  const std::filesystem::path csv_path = out_dir / "sweep.csv";
  save_sweep_csv(csv_path, report);
  written.push_back(csv_path);
  log << "sweep: " << report.channels.size() << " channels x "
      << report.noise_levels.size() << " noise levels x "
      << report.trials_per_cell << " trials -> " << csv_path.string() << "\n";

  if (config.output.svg) {
    double lo = 1e300, hi = -1e300;
    for (const std::vector<double>* grid :
         {&report.bob_mean_snr_db, &report.eve_mean_snr_db})
      for (double v : *grid)
        if (v != kFailedSnr) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
    if (lo > hi) { lo = 0.0; hi = 1.0; }
    const std::filesystem::path bob_path = out_dir / "sweep_bob.svg";
    const std::filesystem::path eve_path = out_dir / "sweep_eve.svg";
    save_sweep_heatmap_svg(bob_path, report, "bob", lo, hi);
    save_sweep_heatmap_svg(eve_path, report, "eve", lo, hi);
    written.push_back(bob_path);
    written.push_back(eve_path);
    log << "sweep: heatmaps " << bob_path.string() << ", " << eve_path.string()
        << "\n";
  }
  return written;
}

std::vector<std::filesystem::path> cmd_secure(
    const ExperimentConfig& config, const std::filesystem::path& out_dir,
    double noise_level, double eve_fail_min, double bob_success_min,
    const std::optional<std::filesystem::path>& csv_path, std::ostream& log) {
  std::filesystem::create_directories(out_dir);

  SweepReport report;
  if (csv_path) {
    report = load_sweep_csv(*csv_path);
  } else {
    const AssembledLink assembled = assemble_link(config);
    report = noise_sweep(assembled.link, config.sweep.noise_levels,
                         config.sweep.trials, config.sweep.base_seed,
                         config.sweep.threads);
  }

  const std::vector<int> secure =
      secure_channels(report, noise_level, eve_fail_min, bob_success_min);

  json doc;
  doc["noise_level"] = noise_level;
  doc["eve_fail_min"] = eve_fail_min;
  doc["bob_success_min"] = bob_success_min;
  doc["trials_per_cell"] = report.trials_per_cell;
  doc["base_seed"] = report.base_seed;
  doc["secure_channels"] = secure;

  const std::filesystem::path path = out_dir / "secure.json";
  write_text_atomic(path, doc.dump(1) + "\n");

  log << "secure: noise_level=" << noise_level << " eve_fail_min=" << eve_fail_min
      << " bob_success_min=" << bob_success_min << " -> " << secure.size()
      << " secure channel(s):";
  for (int ch : secure) log << " " << ch;
  log << "\n";
  return {path};
}

std::vector<std::filesystem::path> cmd_mdm(const ExperimentConfig& config,
                                           const std::filesystem::path& out_dir,
                                           const std::vector<int>& channels,
                                           const std::string& bits,
                                           std::ostream& log) {
  if (channels.empty()) throw std::invalid_argument("mdm: no channels given");
  if (!bits.empty() && bits.size() != channels.size())
    throw std::invalid_argument("mdm: bits length must match channel count");
  for (char b : bits)
    if (b != '0' && b != '1')
      throw std::invalid_argument("mdm: bits must be a binary string");

  std::filesystem::create_directories(out_dir);
  const AssembledLink assembled = assemble_link(config);
  const int n = assembled.link.dimension();

  MdmMessage message;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] < 1 || channels[i] > n)
      throw std::invalid_argument("mdm: channel label " +
                                  std::to_string(channels[i]) +
                                  " outside 1.." + std::to_string(n));
    if (bits.empty() || bits[i] == '1')
      message.active_channels.push_back(channels[i] - 1);
  }
  if (message.active_channels.empty())
    throw std::invalid_argument("mdm: all bits are zero; nothing to send");
  message.validate(n);  // rejects duplicates

  const MdmTrace trace =
      secure_mdm_trial(assembled.link, message, config.sweep.noise_levels,
                       config.sweep.trials, config.sweep.base_seed);

  json doc;
  doc["channels"] = channels;
  doc["bits"] = bits.empty() ? std::string(channels.size(), '1') : bits;
  json active = json::array();
  for (int idx : message.active_channels) active.push_back(idx + 1);
  doc["active_channels"] = active;
  doc["noise_levels"] = trace.noise_levels;
  doc["trials_per_level"] = trace.trials_per_level;
  doc["base_seed"] = trace.base_seed;
  doc["bob"] = {{"success_rate", trace.bob_success_rate},
                {"mean_snr_db", snr_trace_to_json(trace.bob_mean_snr_db)}};
  doc["eve"] = {{"success_rate", trace.eve_success_rate},
                {"mean_snr_db", snr_trace_to_json(trace.eve_mean_snr_db)}};
  if (trace.min_secure_level) doc["min_secure_level"] = *trace.min_secure_level;
  else doc["min_secure_level"] = nullptr;

  const std::filesystem::path path = out_dir / "mdm.json";
  write_text_atomic(path, doc.dump(1) + "\n");

  log << "mdm: message over" ;
  for (int idx : message.active_channels) log << " " << idx + 1;
  if (trace.min_secure_level)
    log << "; secure from noise level " << *trace.min_secure_level;
  else
    log << "; no secure level in the grid";
  log << " -> " << path.string() << "\n";
  return {path};
}

}  // namespace fibersec
