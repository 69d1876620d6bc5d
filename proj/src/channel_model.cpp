#include "fibersec/channel_model.hpp"

#include <map>
#include <stdexcept>

namespace fibersec {

void TapProfile::validate() const {
  if (sigma_sq.size() == 0) throw std::invalid_argument("tap: empty profile");
  if (!(sigma_sq_min > 0.0)) throw std::invalid_argument("tap: sigma_sq_min must be positive");
  if (std::abs(sigma_sq.maxCoeff() - 1.0) > 1e-12)
    throw std::invalid_argument("tap: max(sigma_sq) must be 1");
  if (sigma_sq.minCoeff() < sigma_sq_min - 1e-15)
    throw std::invalid_argument("tap: entries below sigma_sq_min");
}

TapProfile TapProfile::uniform(int n) {
  TapProfile tap;
  tap.sigma_sq = RealVector::Ones(n);
  tap.sigma_sq_min = 1.0;
  tap.provenance = "uniform";
  return tap;
}

TapProfile build_tap_matrix(const ModeBasis& basis, double rho,
                            double sigma_sq_min) {
  if (basis.size() == 0) throw std::invalid_argument("build_tap_matrix: empty basis");
  if (!(sigma_sq_min > 0.0 && sigma_sq_min < 1.0))
    throw std::invalid_argument("build_tap_matrix: sigma_sq_min outside (0,1)");

  const int n = basis.size();
  RealVector fractions(n);
  std::map<std::pair<int, double>, double> cache;  // orientations share radial power
  for (int i = 0; i < n; ++i) {
    const LPMode& mode = basis.modes[i];
    const auto key = std::make_pair(mode.l, mode.u);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, edge_power_fraction(mode, basis.fiber, rho)).first;
    fractions(i) = it->second;
  }

  TapProfile tap;
  tap.rho = rho;
  tap.sigma_sq_min = sigma_sq_min;
  tap.provenance = "edge-power fractions of " + std::to_string(n) +
                   " modes at rho = " + std::to_string(rho);
  tap.sigma_sq.resize(n);

  const double f_min = fractions.minCoeff();
  const double f_max = fractions.maxCoeff();
  if (f_max - f_min <= 0.0) {
    tap.sigma_sq.setOnes();
    tap.sigma_sq_min = 1.0;
    tap.degenerate = true;
    return tap;
  }
  for (int i = 0; i < n; ++i) {
    const double t = (fractions(i) - f_min) / (f_max - f_min);
    tap.sigma_sq(i) = sigma_sq_min * (1.0 - t) + t;  // exact at both endpoints
  }
  return tap;
}

void LinkConfig::validate() const {
  if (t_ab.rows() == 0 || t_ab.rows() != t_ab.cols())
    throw std::invalid_argument("link: t_ab must be square and non-empty");
  if (t_ae.rows() != t_ab.rows() || t_ae.cols() != t_ab.cols())
    throw std::invalid_argument("link: t_ae dimension mismatch");
  if (tap.size() != t_ab.rows())
    throw std::invalid_argument("link: tap length does not match matrix dimension");
  tap.validate();
  if (!(receiver_noise_std >= 0.0))
    throw std::invalid_argument("link: negative receiver_noise_std");
  if (!(artificial_noise_level >= 0.0 && artificial_noise_level <= 1.0))
    throw std::invalid_argument("link: artificial_noise_level outside [0,1]");
}

PreparedLink prepare_link(const LinkConfig& config) {
  config.validate();
  PreparedLink link;
  link.config = config;
  link.t_ab_inverse = tikhonov_inverse(config.t_ab, config.alpha_rule);
  link.precode_divisor = link.t_ab_inverse.norm();
  if (!(link.precode_divisor > 0.0))
    throw std::runtime_error("prepare_link: zero-trace precode divisor");

  link.eve_chain = config.tap.amplitudes().asDiagonal() *
                   (config.t_ae * link.t_ab_inverse);
  link.eve_equalizer = tikhonov_inverse(link.eve_chain, config.alpha_rule);

  const double nominal_rx =
      1.0 / std::sqrt(static_cast<double>(config.dimension()));
  link.receiver_noise_abs = config.receiver_noise_std * nominal_rx;
  return link;
}

ComplexVector draw_artificial_noise(int n, double noise_level,
                                    double active_amplitude, Rng& rng) {
  ComplexVector noise = ComplexVector::Zero(n);
  if (noise_level <= 0.0) return noise;
  // complex entry from unit-variance components has RMS amplitude sqrt(2)
  const double per_component = kArtificialNoiseScale * noise_level *
                               active_amplitude / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) noise(i) = per_component * rng.complex_gaussian();
  return noise;
}

namespace {

ComplexVector precode_core(const ComplexMatrix& t_inv, double divisor,
                           const ComplexVector& x, double noise_level,
                           Seed seed) {
  if (x.size() != t_inv.cols())
    throw std::invalid_argument("precode: dimension mismatch");
  if (!(noise_level >= 0.0 && noise_level <= 1.0))
    throw std::invalid_argument("precode: noise_level outside [0,1]");

  Rng rng(seed);
  const double active_amplitude = x.cwiseAbs().maxCoeff();
  const ComplexVector noise = draw_artificial_noise(
      static_cast<int>(x.size()), noise_level, active_amplitude, rng);
  if (!(divisor > 0.0)) throw std::runtime_error("precode: zero divisor");
  return (t_inv * (x + noise)) / divisor;
}

ComplexVector receiver_noise(int n, double noise_std, Rng& rng) {
  ComplexVector noise(n);
  for (int i = 0; i < n; ++i) noise(i) = noise_std * rng.complex_gaussian();
  return noise;
}

}  // namespace

ComplexVector precode(const ComplexMatrix& t_ab, const ComplexVector& x,
                      double noise_level, const AlphaRule& alpha_rule,
                      Seed seed) {
  const ComplexMatrix t_inv = tikhonov_inverse(t_ab, alpha_rule);
  return precode_core(t_inv, t_inv.norm(), x, noise_level, seed);
}

ComplexVector precode(const PreparedLink& link, const ComplexVector& x,
                      double noise_level, Seed seed) {
  return precode_core(link.t_ab_inverse, link.precode_divisor, x, noise_level,
                      seed);
}

ComplexVector transmit_bob(const ComplexMatrix& t_ab,
                           const ComplexVector& x_precoded, double noise_std,
                           Seed seed) {
  if (x_precoded.size() != t_ab.cols())
    throw std::invalid_argument("transmit_bob: dimension mismatch");
  Rng rng(seed);
  ComplexVector y = t_ab * x_precoded;
  if (noise_std > 0.0)
    y += receiver_noise(static_cast<int>(y.size()), noise_std, rng);
  return y;
}

ComplexVector transmit_eve(const ComplexMatrix& t_ae, const TapProfile& tap,
                           const ComplexVector& x_precoded, double noise_std,
                           Seed seed) {
  if (x_precoded.size() != t_ae.cols())
    throw std::invalid_argument("transmit_eve: dimension mismatch");
  if (tap.size() != t_ae.rows())
    throw std::invalid_argument("transmit_eve: tap length mismatch");
  Rng rng(seed);
  ComplexVector y = tap.amplitudes().asDiagonal() * (t_ae * x_precoded);
  if (noise_std > 0.0)
    y += receiver_noise(static_cast<int>(y.size()), noise_std, rng);
  return y;
}

ComplexVector eve_equalize(const PreparedLink& link, const ComplexVector& y_e) {
  if (y_e.size() != link.eve_equalizer.cols())
    throw std::invalid_argument("eve_equalize: dimension mismatch");
  return link.eve_equalizer * y_e;
}

ComplexVector eve_equalize(const LinkConfig& link, const ComplexVector& y_e) {
  return eve_equalize(prepare_link(link), y_e);
}

}  // namespace fibersec
