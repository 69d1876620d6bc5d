#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "fibersec/security_analysis.hpp"
#include "oracles.hpp"

using namespace fibersec;
using Complex = std::complex<double>;

namespace {

const FiberSpec kReferenceFiber{12.5e-6, 0.1, 532e-9, 1.46};

const TapProfile& reference_tap() {
  static const TapProfile tap = build_tap_matrix(solve_modes(kReferenceFiber));
  return tap;
}

LinkConfig default_link(Seed matrix_seed) {
  LinkConfig link;
  link.t_ab = haar_unitary(55, matrix_seed);
  link.t_ae = link.t_ab;
  link.tap = reference_tap();
  link.alpha_rule = AlphaRule::auto_scaled();
  link.artificial_noise_level = 0.0;
  return link;  // receiver_noise_std stays at the library default
}

int most_attenuated_channel(const TapProfile& tap) {
  Eigen::Index idx;
  tap.sigma_sq.minCoeff(&idx);
  return static_cast<int>(idx);
}

}  // namespace

TEST_CASE("snr_db: closed-form cases") {
  ComplexVector equal(4);
  equal << 1.0, 1.0, 1.0, 1.0;
  CHECK(snr_db(equal, {0, 1}) == doctest::Approx(0.0).epsilon(1e-12));

  ComplexVector y = ComplexVector::Ones(8);
  y(0) = std::sqrt(10.0);
  CHECK(snr_db(y, {0}) == doctest::Approx(10.0).epsilon(1e-12));

  ComplexVector clean = ComplexVector::Zero(5);
  clean(2) = 1.0;
  CHECK(snr_db(clean, {2}) == kSnrCapDb);

  CHECK_THROWS_AS(snr_db(y, {}), std::invalid_argument);
  CHECK_THROWS_AS(snr_db(y, {0, 1, 2, 3, 4, 5, 6, 7}), std::invalid_argument);
}

TEST_CASE("snr_db: matches a direct scalar recomputation") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    ComplexVector y(16);
    for (int i = 0; i < 16; ++i) y(i) = rng.complex_gaussian();
    const std::vector<int> signal{1, 5, 11};

    double sig = 0.0, bg = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double p = std::norm(y(i));
      if (i == 1 || i == 5 || i == 11) sig += p;
      else bg += p;
    }
    const double expected = 10.0 * std::log10((sig / 3.0) / (bg / 13.0));
    CHECK(std::abs(snr_db(y, signal) - expected) < 1e-9);
  }
}

TEST_CASE("snr_db: invariant under global phase and positive scaling") {
  Rng rng(4242);
  ComplexVector y(20);
  for (int i = 0; i < 20; ++i) y(i) = rng.complex_gaussian();
  const std::vector<int> signal{0, 3};
  const double base = snr_db(y, signal);

  const Complex phase = std::polar(1.0, 1.234);
  CHECK(snr_db(phase * y, signal) == doctest::Approx(base).epsilon(1e-12));
  CHECK(snr_db(7.5 * y, signal) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("detect_topk: one-hot, ties, permutation equivariance, sort oracle") {
  ComplexVector one_hot = ComplexVector::Zero(12);
  one_hot(7) = 1.0;
  CHECK(detect_topk(one_hot, 1) == std::vector<int>{7});

  ComplexVector tie = ComplexVector::Ones(5);  // all tied: lowest indices win
  CHECK(detect_topk(tie, 2) == std::vector<int>{0, 1});

  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    ComplexVector y(10);
    for (int i = 0; i < 10; ++i) y(i) = rng.complex_gaussian();
    const int k = 1 + static_cast<int>(rng.next_u64() % 9);

    // full-sort oracle
    std::vector<int> order(10);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(y(a)) > std::abs(y(b)); });
    std::vector<int> expected(order.begin(), order.begin() + k);
    std::sort(expected.begin(), expected.end());
    CHECK(detect_topk(y, k) == expected);
  }

  // permutation equivariance: reversal
  ComplexVector y(6);
  Rng rng2(18);
  for (int i = 0; i < 6; ++i) y(i) = rng2.complex_gaussian();
  const std::vector<int> direct = detect_topk(y, 2);
  const std::vector<int> reversed = detect_topk(y.reverse(), 2);
  std::vector<int> mapped;
  for (int idx : reversed) mapped.push_back(5 - idx);
  std::sort(mapped.begin(), mapped.end());
  CHECK(mapped == direct);
}

TEST_CASE("detect_threshold: limits and brute force") {
  ComplexVector y(4);
  y << 0.1, 0.2, 0.3, 0.4;
  CHECK(detect_threshold(y, 0.5).empty());
  CHECK(detect_threshold(y, 1e-12) == std::vector<int>{0, 1, 2, 3});

  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    ComplexVector v(8);
    for (int i = 0; i < 8; ++i) v(i) = rng.complex_gaussian();
    const double tau = 0.5 + 0.1 * static_cast<double>(trial % 10);
    std::vector<int> expected;
    for (int i = 0; i < 8; ++i)
      if (std::abs(v(i)) >= tau) expected.push_back(i);
    CHECK(detect_threshold(v, tau) == expected);
  }
}

TEST_CASE("mdm message: weights and validation") {
  const MdmMessage message{{2, 9, 4}};
  const ComplexVector x = message.to_vector(12);
  CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(x(2)) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(std::abs(x(0)) == 0.0);

  const MdmMessage duplicate{{1, 1}};
  const MdmMessage negative{{-1}};
  const MdmMessage out_of_range{{8}};
  const MdmMessage empty{};
  CHECK_THROWS_AS(duplicate.validate(8), std::invalid_argument);
  CHECK_THROWS_AS(negative.validate(8), std::invalid_argument);
  CHECK_THROWS_AS(out_of_range.validate(8), std::invalid_argument);
  CHECK_THROWS_AS(empty.validate(8), std::invalid_argument);
}

TEST_CASE("run_trial: noiseless identity link caps both sides") {
  LinkConfig link;
  link.t_ab = ComplexMatrix::Identity(6, 6);
  link.t_ae = link.t_ab;
  link.tap = TapProfile::uniform(6);
  link.receiver_noise_std = 0.0;
  link.alpha_rule = AlphaRule::fixed(0.0);
  link.artificial_noise_level = 0.0;

  const TrialResult r = run_trial(link, MdmMessage{{3}}, 5);
  CHECK(r.bob.success);
  CHECK(r.eve.success);
  CHECK(r.bob.snr_db == kSnrCapDb);
  CHECK(r.eve.snr_db == kSnrCapDb);
}

TEST_CASE("run_trial: success implies a finite SNR, failure the sentinel") {
  LinkConfig link = default_link(3);
  link.artificial_noise_level = 0.5;
  const PreparedLink prepared = prepare_link(link);

  const int weakest = most_attenuated_channel(link.tap);
  for (int trial = 0; trial < 50; ++trial) {
    const TrialResult r =
        run_trial(prepared, MdmMessage{{weakest}}, derive_seed(90, trial));
    if (r.bob.success) CHECK(r.bob.snr_db != kFailedSnr);
    else CHECK(r.bob.snr_db == kFailedSnr);
    if (r.eve.success) CHECK(r.eve.snr_db != kFailedSnr);
    else CHECK(r.eve.snr_db == kFailedSnr);
  }
}

TEST_CASE("run_trial: Eve trails Bob by 10 dB on the most attenuated channel") {
  const LinkConfig link = default_link(11);
  const PreparedLink prepared = prepare_link(link);
  const int weakest = most_attenuated_channel(link.tap);

  double bob_sum = 0.0, eve_sum = 0.0;
  int bob_n = 0, eve_n = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const TrialResult r =
        run_trial(prepared, MdmMessage{{weakest}}, derive_seed(7, trial));
    if (r.bob.success) {
      bob_sum += r.bob.snr_db;
      ++bob_n;
    }
    if (r.eve.success) {
      eve_sum += r.eve.snr_db;
      ++eve_n;
    }
  }
  REQUIRE(bob_n > 100);
  const double bob_mean = bob_sum / bob_n;
  // Eve either fails outright (majority rule would report -inf) or shows a
  // mean at least 10 dB down
  if (eve_n * 2 >= 200) CHECK(eve_sum / eve_n < bob_mean - 10.0);
}

TEST_CASE("channel_sweep: symmetric lossless link has matching curves") {
  LinkConfig link = default_link(13);
  link.tap = TapProfile::uniform(55);

  const SweepReport report = channel_sweep(link, 500, 404);
  REQUIRE(report.channels.size() == 55);
  REQUIRE(report.noise_levels.size() == 1);

  for (std::size_t ci = 0; ci < report.channels.size(); ++ci) {
    const std::size_t c = report.cell(static_cast<int>(ci), 0);
    CHECK(report.bob_mean_snr_db[c] != kFailedSnr);
    CHECK(report.eve_mean_snr_db[c] != kFailedSnr);
    CHECK(std::abs(report.bob_mean_snr_db[c] - report.eve_mean_snr_db[c]) < 1.0);
  }
}

TEST_CASE("channel_sweep: Eve's deficit is rank-correlated with the attenuation") {
  const LinkConfig link = default_link(17);
  const SweepReport report = channel_sweep(link, 500, 505);

  std::vector<double> deficit, inverse_sigma;
  for (int ci = 0; ci < 55; ++ci) {
    const std::size_t c = report.cell(ci, 0);
    if (report.bob_mean_snr_db[c] == kFailedSnr ||
        report.eve_mean_snr_db[c] == kFailedSnr)
      continue;  // treat fully failed cells apart; rank check uses finite cells
    deficit.push_back(report.bob_mean_snr_db[c] - report.eve_mean_snr_db[c]);
    inverse_sigma.push_back(1.0 / link.tap.sigma_sq(ci));
  }
  REQUIRE(deficit.size() > 30);
  CHECK(oracles::spearman_rho(deficit, inverse_sigma) > 0.8);
}

TEST_CASE("noise_sweep: grid shape, determinism, channel_sweep consistency") {
  LinkConfig link = default_link(19);
  const std::vector<double> levels{0.0, 0.5, 1.0};

  const SweepReport report = noise_sweep(link, levels, 60, 606);
  CHECK(report.channels.size() == 55);
  CHECK(report.noise_levels == levels);
  CHECK(report.bob_mean_snr_db.size() == 55 * 3);

  // deterministic under reruns and thread counts
  const SweepReport again = noise_sweep(link, levels, 60, 606, 1);
  CHECK(report.bob_mean_snr_db == again.bob_mean_snr_db);
  CHECK(report.eve_mean_snr_db == again.eve_mean_snr_db);
  CHECK(report.bob_success_rate == again.bob_success_rate);

  // the level-0 column equals a channel sweep at level 0 (seeds derive from
  // the level value, not its grid position)
  const SweepReport single = channel_sweep(link, 60, 606);
  for (int ci = 0; ci < 55; ++ci) {
    CHECK(single.bob_mean_snr_db[single.cell(ci, 0)] ==
          report.bob_mean_snr_db[report.cell(ci, 0)]);
    CHECK(single.eve_success_rate[single.cell(ci, 0)] ==
          report.eve_success_rate[report.cell(ci, 0)]);
  }
}

TEST_CASE("noise_sweep: Eve's success never significantly increases with noise") {
  const LinkConfig link = default_link(23);
  const std::vector<double> levels{0.0, 0.25, 0.5, 0.75, 1.0};
  const int trials = 200;
  const SweepReport report = noise_sweep(link, levels, trials, 707);

  // one-sided binomial comparison at roughly the 3.5-sigma level
  for (int ci = 0; ci < 55; ci += 5) {
    for (std::size_t li = 1; li < levels.size(); ++li) {
      const double p_prev = report.eve_success_rate[report.cell(ci, li - 1)];
      const double p_next = report.eve_success_rate[report.cell(ci, li)];
      const double pooled = 0.5 * (p_prev + p_next);
      const double sigma =
          std::sqrt(std::max(pooled * (1.0 - pooled) * 2.0 / trials, 1e-9));
      CHECK(p_next <= p_prev + 3.5 * sigma);
    }
  }
}

TEST_CASE("noise_sweep: Bob holds at full artificial noise on most channels") {
  const LinkConfig link = default_link(29);
  const SweepReport report = noise_sweep(link, {1.0}, 200, 808);

  int solid = 0;
  for (int ci = 0; ci < 55; ++ci)
    if (report.bob_success_rate[report.cell(ci, 0)] >= 0.9) ++solid;
  CHECK(solid >= 44);  // at least 80% of the channels
}

TEST_CASE("secure_channels: symmetric link yields the empty set") {
  LinkConfig link = default_link(31);
  link.tap = TapProfile::uniform(55);
  link.artificial_noise_level = 0.5;
  const SweepReport report = channel_sweep(link, 200, 909);
  CHECK(secure_channels(report, 0.5).empty());
}

TEST_CASE("secure_channels: consistency with the report cells") {
  LinkConfig link = default_link(37);
  const SweepReport report = noise_sweep(link, {0.5}, 200, 111);

  const std::vector<int> secure = secure_channels(report, 0.5);
  for (int label : secure) {
    const std::size_t c = report.cell(label - 1, 0);
    CHECK(report.eve_success_rate[c] <= 0.01);
    CHECK(report.bob_success_rate[c] >= 0.99);
    CHECK(report.eve_mean_snr_db[c] == kFailedSnr);  // majority failed
  }

  // monotone in the Eve threshold
  const std::vector<int> strict = secure_channels(report, 0.5, 1.0, 0.99);
  CHECK(strict.size() <= secure.size());
  for (int label : strict)
    CHECK(std::find(secure.begin(), secure.end(), label) != secure.end());

  CHECK_THROWS_AS(secure_channels(report, 0.33), std::invalid_argument);
}

TEST_CASE("mdm_symbol_count") {
  CHECK(mdm_symbol_count(55, 3) == 157410);
  CHECK(mdm_symbol_count(55, 1) == 55);
  CHECK(mdm_symbol_count(4, 2) == 12);  // ordered pairs of 4, enumerated

  int enumerated = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) ++enumerated;
  CHECK(enumerated == 12);

  CHECK_THROWS_AS(mdm_symbol_count(3, 4), std::invalid_argument);
}

TEST_CASE("mdm power splitting: single over triple amplitude is sqrt(3)") {
  const int n = 55;
  LinkConfig link;
  link.t_ab = ComplexMatrix::Identity(n, n);
  link.t_ae = link.t_ab;
  link.tap = TapProfile::uniform(n);
  link.receiver_noise_std = 0.0;
  link.alpha_rule = AlphaRule::fixed(0.0);
  const PreparedLink prepared = prepare_link(link);

  const ComplexVector single =
      transmit_bob(link.t_ab, precode(prepared, MdmMessage{{7}}.to_vector(n), 0.0, 1), 0.0, 2);
  const ComplexVector triple =
      transmit_bob(link.t_ab, precode(prepared, MdmMessage{{7, 8, 9}}.to_vector(n), 0.0, 1), 0.0, 2);

  const double ratio = std::abs(single(7)) / std::abs(triple(7));
  CHECK(std::abs(ratio - std::sqrt(3.0)) < 1e-9);
}

TEST_CASE("bob detects perfectly on every channel of a noiseless zero-alpha link") {
  for (Seed s : {2, 3}) {
    LinkConfig link;
    link.t_ab = haar_unitary(55, s);
    link.t_ae = link.t_ab;
    link.tap = TapProfile::uniform(55);
    link.receiver_noise_std = 0.0;
    link.alpha_rule = AlphaRule::fixed(0.0);
    link.artificial_noise_level = 0.0;
    const PreparedLink prepared = prepare_link(link);
    for (int channel = 0; channel < 55; ++channel) {
      const TrialResult r =
          run_trial(prepared, MdmMessage{{channel}}, derive_seed(s, channel));
      CHECK(r.bob.success);
    }
  }
}

TEST_CASE("secure_mdm_trial: two safest plus one insecure channel") {
  LinkConfig link = default_link(47);
  const auto& tap = link.tap;
  std::vector<int> order(tap.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return tap.sigma_sq(a) < tap.sigma_sq(b); });

  const MdmMessage message{{order[0], order[1], order.back()}};
  const MdmTrace trace = secure_mdm_trial(
      link, message, {0.0, 0.25, 0.5, 0.75, 1.0}, 120, 808, 0.95, 0.95);

  // Bob holds through mid noise; Eve's exact-set detection collapses by 50%
  for (std::size_t li = 0; li <= 2; ++li) CHECK(trace.bob_success_rate[li] >= 0.95);
  for (std::size_t li = 2; li < trace.noise_levels.size(); ++li)
    CHECK(trace.eve_success_rate[li] <= 0.05);
  REQUIRE(trace.min_secure_level.has_value());
  CHECK(*trace.min_secure_level <= 0.5);
}

TEST_CASE("noise_sweep rejects a non-ascending level grid") {
  LinkConfig link = default_link(49);
  CHECK_THROWS_AS(noise_sweep(link, {0.5, 0.25}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(noise_sweep(link, {0.5, 0.5}, 5, 1), std::invalid_argument);
}

TEST_CASE("secure_mdm_trial: k = 1 reduces to run_trial cells") {
  LinkConfig link = default_link(41);
  const MdmMessage message{{0}};
  const MdmTrace trace = secure_mdm_trial(link, message, {0.0, 0.5}, 50, 222);

  REQUIRE(trace.noise_levels.size() == 2);
  const PreparedLink prepared = prepare_link(link);
  int successes = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Seed seed = derive_seed(222, 0, std::bit_cast<std::uint64_t>(0.5), trial);
    if (run_trial_at_level(prepared, message, 0.5, seed).bob.success) ++successes;
  }
  CHECK(trace.bob_success_rate[1] == doctest::Approx(successes / 50.0).epsilon(1e-12));
}

TEST_CASE("sweep CSV: schema, round trip, sentinel formatting") {
  LinkConfig link = default_link(43);
  const SweepReport report = noise_sweep(link, {0.0, 0.5}, 40, 333);

  const std::string csv = sweep_to_csv(report);
  CHECK(csv.find("channel,noise_level,side,mean_snr_db,success_rate,trials") !=
        std::string::npos);

  const SweepReport parsed = sweep_from_csv(csv);
  CHECK(parsed.channels == report.channels);
  CHECK(parsed.noise_levels == report.noise_levels);
  CHECK(parsed.trials_per_cell == report.trials_per_cell);
  CHECK(parsed.base_seed == report.base_seed);
  CHECK(parsed.bob_success_rate == report.bob_success_rate);
  CHECK(parsed.eve_success_rate == report.eve_success_rate);

  // re-serialization is byte-identical (dB values already rounded)
  CHECK(sweep_to_csv(parsed) == csv);

  // the sentinel appears as "-inf" whenever a cell failed
  bool found_sentinel = false;
  for (double v : report.eve_mean_snr_db)
    if (v == kFailedSnr) found_sentinel = true;
  if (found_sentinel) CHECK(csv.find("-inf") != std::string::npos);
}
