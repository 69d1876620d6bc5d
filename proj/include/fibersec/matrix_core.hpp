#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "fibersec/rng.hpp"

namespace fibersec {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Result of a complex singular value decomposition M = U * diag(S) * Vh.
/// Singular values are non-negative and sorted descending; U columns and
/// Vh rows are orthonormal to 1e-10 and the reconstruction error is below
/// 1e-10 relative.
struct SvdFactors {
  ComplexMatrix u;
  RealVector singular_values;
  ComplexMatrix v_adjoint;

  ComplexMatrix reconstruct() const {
    return u * singular_values.asDiagonal() * v_adjoint;
  }
};

SvdFactors svd(const ComplexMatrix& m);

/// Fraction of the largest singular value used by the automatic
/// regularization rule.
inline constexpr double kAutoAlphaFraction = 0.12;

/// Regularization rule for Tikhonov inversions. Auto resolves to 12% of
/// the largest singular value of the matrix being inverted, which keeps
/// the noise amplification of near-singular directions bounded; Fixed uses
/// the given value everywhere.
struct AlphaRule {
  enum class Kind { Auto, Fixed };
  Kind kind = Kind::Auto;
  double value = 0.0;

  static AlphaRule auto_scaled() { return {Kind::Auto, 0.0}; }
  static AlphaRule fixed(double alpha) { return {Kind::Fixed, alpha}; }
};

double resolve_alpha(const AlphaRule& rule, const SvdFactors& factors);

/// Tikhonov-regularized pseudo-inverse: each singular value s becomes
/// s/(s^2 + alpha^2) and the factors are recomposed as V * Sf * U^H.
/// alpha = 0 on a singular matrix falls back to the Moore-Penrose
/// convention (zero singular values invert to zero); an all-zero matrix
/// with alpha = 0 is rejected.
ComplexMatrix tikhonov_inverse(const ComplexMatrix& m, double alpha);
ComplexMatrix tikhonov_inverse(const ComplexMatrix& m, const AlphaRule& rule);

/// Haar-distributed random unitary: QR of a complex standard Gaussian
/// matrix with the diagonal phase correction. Deterministic per seed.
ComplexMatrix haar_unitary(int n, Seed seed);

/// exp(i * epsilon * G) with G a random Hermitian matrix (Gaussian
/// entries, scaled to roughly unit spectral radius so epsilon reads as a
/// phase spread in radians). epsilon = 0 gives the exact identity; larger
/// epsilon mixes more power off the diagonal, saturating near full
/// scrambling around epsilon ~ pi. Emulates the length-dependent
/// scrambling strength of short fiber segments.
ComplexMatrix coupled_unitary(int n, double epsilon, Seed seed);

/// Adds independent complex Gaussian noise with per-component standard
/// deviation sigma_meas * (RMS entry magnitude of m) to every entry.
/// Models the imperfection of a measured transmission matrix.
ComplexMatrix emulate_measurement(const ComplexMatrix& m, double sigma_meas,
                                  Seed seed);

/// x / ||x||. Rejects the zero vector.
ComplexVector normalize_unit(const ComplexVector& x);

/// x_hat / sqrt(tr(t_inv * t_inv^H)); the divisor equals the Frobenius
/// norm of t_inv, which keeps the average transmit power constant across
/// channel realizations.
ComplexVector normalize_precoded(const ComplexVector& x_hat,
                                 const ComplexMatrix& t_inv);

/// Mean diagonal power over (mean diagonal power + mean off-diagonal
/// power) of a diagonalized transmission matrix. 1x1 matrices rate 1.0 by
/// convention.
double precoding_efficiency(const ComplexMatrix& t_diag);

/// Transmission-matrix file format: a JSON document with fields
///   n     - dimension (square matrices only)
///   basis - label of the mode basis the coefficients refer to, e.g. "LP"
///   data  - row-major array of [re, im] pairs, n*n entries
/// Round-trips are lossless (shortest round-trip double formatting).
void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m,
                 const std::string& basis = "LP");
ComplexMatrix load_matrix(const std::filesystem::path& path,
                          std::string* basis_out = nullptr);

}  // namespace fibersec
