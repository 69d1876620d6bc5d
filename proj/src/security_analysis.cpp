#include "fibersec/security_analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fibersec {

double snr_db(const ComplexVector& y, const std::vector<int>& signal_set,
              double cap_db) {
  const int n = static_cast<int>(y.size());
  if (signal_set.empty()) throw std::invalid_argument("snr_db: empty signal set");
  if (static_cast<int>(signal_set.size()) >= n)
    throw std::invalid_argument("snr_db: signal set must be a proper subset");

  std::vector<char> in_signal(n, 0);
  for (int idx : signal_set) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("snr_db: index out of range");
    in_signal[idx] = 1;
  }

  double signal_power = 0.0, background_power = 0.0;
  int signal_count = 0, background_count = 0;
  for (int i = 0; i < n; ++i) {
    const double p = std::norm(y(i));
    if (in_signal[i]) {
      signal_power += p;
      ++signal_count;
    } else {
      background_power += p;
      ++background_count;
    }
  }
  const double mean_signal = signal_power / signal_count;
  const double mean_background = background_power / background_count;
  if (mean_background == 0.0) return cap_db;
  return 10.0 * std::log10(mean_signal / mean_background);
}

std::vector<int> detect_topk(const ComplexVector& y, int k) {
  const int n = static_cast<int>(y.size());
  if (k < 1 || k > n) throw std::invalid_argument("detect_topk: k out of range");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(y(a)), mb = std::abs(y(b));
    if (ma != mb) return ma > mb;
    return a < b;  // ties toward the lower index
  });
  std::vector<int> detected(order.begin(), order.begin() + k);
  std::sort(detected.begin(), detected.end());
  return detected;
}

std::vector<int> detect_threshold(const ComplexVector& y, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("detect_threshold: tau must be positive");
  std::vector<int> detected;
  for (int i = 0; i < y.size(); ++i)
    if (std::abs(y(i)) >= tau) detected.push_back(i);
  return detected;
}

void MdmMessage::validate(int dimension) const {
  if (active_channels.empty())
    throw std::invalid_argument("message: no active channels");
  if (size() > dimension)
    throw std::invalid_argument("message: more channels than the link dimension");
  std::vector<int> sorted = active_channels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("message: duplicate channel indices");
  if (sorted.front() < 0 || sorted.back() >= dimension)
    throw std::invalid_argument("message: channel index out of range");
}

ComplexVector MdmMessage::to_vector(int dimension) const {
  validate(dimension);
  ComplexVector x = ComplexVector::Zero(dimension);
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(size()));
  for (int idx : active_channels) x(idx) = amplitude;
  return x;
}

namespace {

DetectionResult detect_and_score(const ComplexVector& y,
                                 const std::vector<int>& sent_sorted) {
  DetectionResult result;
  result.detected_channels = detect_topk(y, static_cast<int>(sent_sorted.size()));
  result.success = result.detected_channels == sent_sorted;
  result.snr_db = result.success ? snr_db(y, sent_sorted) : kFailedSnr;
  return result;
}

}  // namespace

TrialResult run_trial_at_level(const PreparedLink& link,
                               const MdmMessage& message, double noise_level,
                               Seed seed) {
  const int n = link.config.dimension();
  const ComplexVector x = message.to_vector(n);

  const ComplexVector x_precoded =
      precode(link, x, noise_level, derive_seed(seed, 1));
  const ComplexVector y_bob =
      transmit_bob(link.config.t_ab, x_precoded, link.receiver_noise_abs,
                   derive_seed(seed, 2));
  const ComplexVector y_eve_raw =
      transmit_eve(link.config.t_ae, link.config.tap, x_precoded,
                   link.receiver_noise_abs, derive_seed(seed, 3));
  const ComplexVector y_eve = eve_equalize(link, y_eve_raw);

  std::vector<int> sent = message.active_channels;
  std::sort(sent.begin(), sent.end());

  TrialResult result;
  result.bob = detect_and_score(y_bob, sent);
  result.eve = detect_and_score(y_eve, sent);
  return result;
}

TrialResult run_trial(const PreparedLink& link, const MdmMessage& message,
                      Seed seed) {
  return run_trial_at_level(link, message, link.config.artificial_noise_level,
                            seed);
}

TrialResult run_trial(const LinkConfig& link, const MdmMessage& message,
                      Seed seed) {
  return run_trial(prepare_link(link), message, seed);
}

std::optional<int> SweepReport::level_position(double noise_level) const {
  for (std::size_t i = 0; i < noise_levels.size(); ++i)
    if (noise_levels[i] == noise_level) return static_cast<int>(i);
  return std::nullopt;
}

namespace {

struct CellStats {
  double success_rate = 0.0;
  double mean_snr_db = kFailedSnr;
};

// Majority rule: the cell mean is the -inf sentinel unless at least half
// the trials detected correctly; the mean averages successful trials only.
CellStats summarize(const std::vector<double>& snrs, int successes, int trials) {
  CellStats stats;
  stats.success_rate = static_cast<double>(successes) / trials;
  if (successes * 2 >= trials && successes > 0) {
    double sum = 0.0;
    for (double v : snrs) sum += v;
    stats.mean_snr_db = sum / successes;
  }
  return stats;
}

Seed cell_trial_seed(Seed base, int channel_label, double noise_level,
                     int trial) {
  return derive_seed(base, static_cast<std::uint64_t>(channel_label),
                     std::bit_cast<std::uint64_t>(noise_level),
                     static_cast<std::uint64_t>(trial));
}

void run_parallel(int jobs, int threads, const std::function<void(int)>& work) {
  if (threads <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    threads = hc == 0 ? 1 : static_cast<int>(hc);
  }
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    for (int j = 0; j < jobs; ++j) work(j);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      try {
        for (int j = t; j < jobs; j += threads) work(j);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace

SweepReport noise_sweep(const LinkConfig& link,
                        const std::vector<double>& noise_levels, int trials,
                        Seed seed, int threads) {
  if (noise_levels.empty()) throw std::invalid_argument("noise_sweep: empty level grid");
  for (std::size_t i = 0; i < noise_levels.size(); ++i) {
    if (!(noise_levels[i] >= 0.0 && noise_levels[i] <= 1.0))
      throw std::invalid_argument("noise_sweep: level outside [0,1]");
    if (i > 0 && noise_levels[i] <= noise_levels[i - 1])
      throw std::invalid_argument("noise_sweep: levels must be strictly ascending");
  }
  if (trials < 1) throw std::invalid_argument("noise_sweep: trials must be >= 1");

  const PreparedLink prepared = prepare_link(link);
  const int n = link.dimension();
  const int n_levels = static_cast<int>(noise_levels.size());

  SweepReport report;
  report.channels.resize(n);
  for (int i = 0; i < n; ++i) report.channels[i] = i + 1;
  report.noise_levels = noise_levels;
  report.trials_per_cell = trials;
  report.base_seed = seed;
  const std::size_t cells = static_cast<std::size_t>(n) * n_levels;
  report.bob_mean_snr_db.resize(cells);
  report.eve_mean_snr_db.resize(cells);
  report.bob_success_rate.resize(cells);
  report.eve_success_rate.resize(cells);

  run_parallel(n, threads, [&](int channel) {
    MdmMessage message{{channel}};
    for (int li = 0; li < n_levels; ++li) {
      const double level = noise_levels[li];
      std::vector<double> bob_snrs, eve_snrs;
      bob_snrs.reserve(trials);
      eve_snrs.reserve(trials);
      int bob_ok = 0, eve_ok = 0;
      for (int trial = 0; trial < trials; ++trial) {
        const Seed trial_seed =
            cell_trial_seed(seed, channel + 1, level, trial);
        const TrialResult r =
            run_trial_at_level(prepared, message, level, trial_seed);
        if (r.bob.success) {
          ++bob_ok;
          bob_snrs.push_back(r.bob.snr_db);
        }
        if (r.eve.success) {
          ++eve_ok;
          eve_snrs.push_back(r.eve.snr_db);
        }
      }
      const std::size_t c = report.cell(channel, li);
      const CellStats bob = summarize(bob_snrs, bob_ok, trials);
      const CellStats eve = summarize(eve_snrs, eve_ok, trials);
      report.bob_mean_snr_db[c] = bob.mean_snr_db;
      report.bob_success_rate[c] = bob.success_rate;
      report.eve_mean_snr_db[c] = eve.mean_snr_db;
      report.eve_success_rate[c] = eve.success_rate;
    }
  });
  return report;
}

SweepReport channel_sweep(const LinkConfig& link, int trials, Seed seed) {
  return noise_sweep(link, {link.artificial_noise_level}, trials, seed);
}

std::vector<int> secure_channels(const SweepReport& report, double noise_level,
                                 double eve_fail_min, double bob_success_min) {
  const std::optional<int> pos = report.level_position(noise_level);
  if (!pos) {
    std::ostringstream msg;
    msg << "secure_channels: noise level " << noise_level
        << " not in report; available:";
    for (double level : report.noise_levels) msg << " " << level;
    throw std::invalid_argument(msg.str());
  }

  std::vector<int> secure;
  for (std::size_t ci = 0; ci < report.channels.size(); ++ci) {
    const std::size_t c = report.cell(static_cast<int>(ci), *pos);
    const double eve_fail = 1.0 - report.eve_success_rate[c];
    if (eve_fail >= eve_fail_min && report.bob_success_rate[c] >= bob_success_min)
      secure.push_back(report.channels[ci]);
  }
  return secure;
}

std::uint64_t mdm_symbol_count(int n, int k) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("mdm_symbol_count: need 1 <= k <= n");
  std::uint64_t count = 1;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t factor = static_cast<std::uint64_t>(n - i);
    if (count > std::numeric_limits<std::uint64_t>::max() / factor)
      throw std::overflow_error("mdm_symbol_count: overflow");
    count *= factor;
  }
  return count;
}

MdmTrace secure_mdm_trial(const LinkConfig& link, const MdmMessage& message,
                          const std::vector<double>& noise_levels, int trials,
                          Seed seed, double eve_fail_min,
                          double bob_success_min) {
  if (noise_levels.empty())
    throw std::invalid_argument("secure_mdm_trial: empty level grid");
  for (std::size_t i = 1; i < noise_levels.size(); ++i)
    if (noise_levels[i] <= noise_levels[i - 1])
      throw std::invalid_argument("secure_mdm_trial: levels must be strictly ascending");
  if (trials < 1) throw std::invalid_argument("secure_mdm_trial: trials must be >= 1");
  message.validate(link.dimension());

  const PreparedLink prepared = prepare_link(link);

  MdmTrace trace;
  trace.message = message;
  trace.noise_levels = noise_levels;
  trace.trials_per_level = trials;
  trace.base_seed = seed;

  for (std::size_t li = 0; li < noise_levels.size(); ++li) {
    const double level = noise_levels[li];
    std::vector<double> bob_snrs, eve_snrs;
    int bob_ok = 0, eve_ok = 0;
    for (int trial = 0; trial < trials; ++trial) {
      const Seed trial_seed = cell_trial_seed(seed, 0, level, trial);
      const TrialResult r = run_trial_at_level(prepared, message, level, trial_seed);
      if (r.bob.success) {
        ++bob_ok;
        bob_snrs.push_back(r.bob.snr_db);
      }
      if (r.eve.success) {
        ++eve_ok;
        eve_snrs.push_back(r.eve.snr_db);
      }
    }
    const CellStats bob = summarize(bob_snrs, bob_ok, trials);
    const CellStats eve = summarize(eve_snrs, eve_ok, trials);
    trace.bob_success_rate.push_back(bob.success_rate);
    trace.eve_success_rate.push_back(eve.success_rate);
    trace.bob_mean_snr_db.push_back(bob.mean_snr_db);
    trace.eve_mean_snr_db.push_back(eve.mean_snr_db);
    if (!trace.min_secure_level &&
        1.0 - eve.success_rate >= eve_fail_min &&
        bob.success_rate >= bob_success_min)
      trace.min_secure_level = level;
  }
  return trace;
}

namespace {

std::string format_snr(double value) {
  if (value == kFailedSnr) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_snr(const std::string& field) {
  if (field == "-inf") return kFailedSnr;
  return std::stod(field);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::string sweep_to_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "# fibersec sweep report; base_seed=" << report.base_seed << "\n";
  out << "channel,noise_level,side,mean_snr_db,success_rate,trials\n";
  for (std::size_t ci = 0; ci < report.channels.size(); ++ci)
    for (std::size_t li = 0; li < report.noise_levels.size(); ++li) {
      const std::size_t c = report.cell(static_cast<int>(ci), static_cast<int>(li));
      const std::string prefix = std::to_string(report.channels[ci]) + "," +
                                 format_full(report.noise_levels[li]) + ",";
      out << prefix << "bob," << format_snr(report.bob_mean_snr_db[c]) << ","
          << format_full(report.bob_success_rate[c]) << ","
          << report.trials_per_cell << "\n";
      out << prefix << "eve," << format_snr(report.eve_mean_snr_db[c]) << ","
          << format_full(report.eve_success_rate[c]) << ","
          << report.trials_per_cell << "\n";
    }
  return out.str();
}

SweepReport sweep_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;

  SweepReport report;
  struct Row {
    int channel;
    double level;
    bool is_bob;
    double snr;
    double rate;
    int trials;
  };
  std::vector<Row> rows;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("base_seed=");
      if (pos != std::string::npos)
        report.base_seed = std::stoull(line.substr(pos + 10));
      continue;
    }
    if (line.rfind("channel,", 0) == 0) continue;  // header
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 6)
      throw std::invalid_argument("sweep_from_csv: malformed row: " + line);
    Row row;
    row.channel = std::stoi(fields[0]);
    row.level = std::stod(fields[1]);
    if (fields[2] == "bob") row.is_bob = true;
    else if (fields[2] == "eve") row.is_bob = false;
    else throw std::invalid_argument("sweep_from_csv: unknown side " + fields[2]);
    row.snr = parse_snr(fields[3]);
    row.rate = std::stod(fields[4]);
    row.trials = std::stoi(fields[5]);
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("sweep_from_csv: no data rows");

  for (const Row& row : rows) {
    if (report.channels.empty() || report.channels.back() != row.channel) {
      if (std::find(report.channels.begin(), report.channels.end(),
                    row.channel) == report.channels.end())
        report.channels.push_back(row.channel);
    }
    if (std::find(report.noise_levels.begin(), report.noise_levels.end(),
                  row.level) == report.noise_levels.end())
      report.noise_levels.push_back(row.level);
  }

  const std::size_t cells = report.channels.size() * report.noise_levels.size();
  report.bob_mean_snr_db.assign(cells, kFailedSnr);
  report.eve_mean_snr_db.assign(cells, kFailedSnr);
  report.bob_success_rate.assign(cells, 0.0);
  report.eve_success_rate.assign(cells, 0.0);

  for (const Row& row : rows) {
    const auto ci = std::find(report.channels.begin(), report.channels.end(),
                              row.channel) - report.channels.begin();
    const auto li = std::find(report.noise_levels.begin(),
                              report.noise_levels.end(), row.level) -
                    report.noise_levels.begin();
    const std::size_t c = report.cell(static_cast<int>(ci), static_cast<int>(li));
    if (row.is_bob) {
      report.bob_mean_snr_db[c] = row.snr;
      report.bob_success_rate[c] = row.rate;
    } else {
      report.eve_mean_snr_db[c] = row.snr;
      report.eve_success_rate[c] = row.rate;
    }
    report.trials_per_cell = row.trials;
  }
  return report;
}

void save_sweep_csv(const std::filesystem::path& path,
                    const SweepReport& report) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("save_sweep_csv: cannot open " + tmp.string());
    out << sweep_to_csv(report);
  }
  std::filesystem::rename(tmp, path);
}

SweepReport load_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_sweep_csv: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sweep_from_csv(buffer.str());
}

}  // namespace fibersec
