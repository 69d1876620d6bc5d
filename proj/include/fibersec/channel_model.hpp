#pragma once

#include <string>

#include "fibersec/fiber_modes.hpp"
#include "fibersec/matrix_core.hpp"
#include "fibersec/rng.hpp"

namespace fibersec {

/// Diagonal mode-dependent-loss profile of the eavesdropper tap. sigma_sq
/// holds the per-mode power coupling factors (the diagonal of V), affine
/// images of the modes' edge-power fractions with max = 1 and
/// min = sigma_sq_min.
struct TapProfile {
  RealVector sigma_sq;
  double rho = 0.8;
  double sigma_sq_min = 0.0028;
  std::string provenance;
  bool degenerate = false;  // set when the fractions carried no spread

  int size() const { return static_cast<int>(sigma_sq.size()); }

  /// Per-mode amplitude factors sigma_i (the diagonal of sqrt(V)).
  RealVector amplitudes() const { return sigma_sq.cwiseSqrt(); }

  void validate() const;

  /// Uniform (lossless) tap, sigma_i^2 = 1 on every mode.
  static TapProfile uniform(int n);
};

/// Maps each mode's edge-power fraction at the given rho onto [sigma_sq_min, 1]
/// with the affine rule sigma_i^2 = lerp(sigma_sq_min, 1, (f_i - f_min)/(f_max - f_min)).
/// A basis without spread in the fractions (e.g. a single-mode fiber)
/// degenerates to the all-ones profile with the warning flag set.
TapProfile build_tap_matrix(const ModeBasis& basis, double rho = 0.8,
                            double sigma_sq_min = 0.0028);

/// Amplitude calibration of the artificial-noise axis: a noise level of 1.0
/// ("100% of the signal amplitude") injects entries whose RMS amplitude is
/// this fraction of one active-entry amplitude. The value places the 0..1
/// level axis on the secure operating range of the link: at full scale the
/// legitimate receiver still detects reliably on most channels, while from
/// about half scale the eavesdropper's equalized detection collapses on
/// the strongly attenuated channels.
inline constexpr double kArtificialNoiseScale = 0.32;

/// Full Alice-Bob-Eve scenario. receiver_noise_std is the per-component
/// standard deviation of the additive receiver noise, expressed relative to
/// the nominal received amplitude of a unit single-channel message through
/// an ideally precoded link (1/sqrt(N)); Bob and Eve always see the same
/// absolute noise level. artificial_noise_level is the artificial-noise
/// fraction, 0 to 1, scaled by kArtificialNoiseScale onto entry amplitudes.
struct LinkConfig {
  ComplexMatrix t_ab;
  ComplexMatrix t_ae;
  TapProfile tap;
  double receiver_noise_std = 0.01;
  AlphaRule alpha_rule = AlphaRule::auto_scaled();
  double artificial_noise_level = 0.0;

  int dimension() const { return static_cast<int>(t_ab.rows()); }
  void validate() const;
};

/// Link with every trial-invariant quantity precomputed: Alice's Tikhonov
/// inverse and its Frobenius divisor, Eve's effective channel
/// H = sqrt(V) T_AE T_AB^dagger, Eve's equalizer H^dagger under the same
/// alpha rule, and the absolute receiver noise level.
struct PreparedLink {
  LinkConfig config;
  ComplexMatrix t_ab_inverse;
  double precode_divisor = 0.0;
  ComplexMatrix eve_chain;
  ComplexMatrix eve_equalizer;
  double receiver_noise_abs = 0.0;
};

PreparedLink prepare_link(const LinkConfig& config);

/// Artificial transmit noise: complex white Gaussian across all N mode
/// coordinates, scaled so the RMS entry amplitude equals
/// kArtificialNoiseScale * noise_level * active_amplitude.
ComplexVector draw_artificial_noise(int n, double noise_level,
                                    double active_amplitude, Rng& rng);

/// Inverse precoding with optional artificial noise: returns
/// T_AB^dagger (x + n~) normalized by the Frobenius divisor. x must already
/// be unit-normalized; the active amplitude for the noise scale is taken as
/// max_i |x_i|.
ComplexVector precode(const ComplexMatrix& t_ab, const ComplexVector& x,
                      double noise_level, const AlphaRule& alpha_rule,
                      Seed seed);

/// Same operation against a prepared link (identical output for identical
/// seed and configuration).
ComplexVector precode(const PreparedLink& link, const ComplexVector& x,
                      double noise_level, Seed seed);

/// Bob's observation y_B = T_AB x_precoded + n_B with complex white
/// Gaussian receiver noise of the given absolute per-component std.
ComplexVector transmit_bob(const ComplexMatrix& t_ab,
                           const ComplexVector& x_precoded, double noise_std,
                           Seed seed);

/// Eve's observation y_E = sqrt(V) T_AE x_precoded + n_E.
ComplexVector transmit_eve(const ComplexMatrix& t_ae, const TapProfile& tap,
                           const ComplexVector& x_precoded, double noise_std,
                           Seed seed);

/// Eve's channel compensation y~_E = H^dagger y_E.
ComplexVector eve_equalize(const PreparedLink& link, const ComplexVector& y_e);
ComplexVector eve_equalize(const LinkConfig& link, const ComplexVector& y_e);

}  // namespace fibersec
