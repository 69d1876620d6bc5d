#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace fibersec {

/// Step-index fiber described by its core radius, numerical aperture and
/// operating wavelength. The cladding index is derived from the core index
/// and the NA under the weakly-guiding approximation.
struct FiberSpec {
  double core_radius = 12.5e-6;       // meters
  double numerical_aperture = 0.1;
  double wavelength = 532e-9;         // meters
  double core_index = 1.46;

  void validate() const;
};

/// Normalized frequency 2*pi*a*NA/lambda.
double v_number(const FiberSpec& fiber);

enum class Orientation { Cosine, Sine };

/// One guided LP mode. u and w are the transverse core and cladding decay
/// parameters of the scalar dispersion relation; u^2 + w^2 = V^2.
struct LPMode {
  int l = 0;                 // azimuthal order, >= 0
  int m = 1;                 // radial order, >= 1
  Orientation orientation = Orientation::Cosine;
  double u = 0.0;
  double w = 0.0;
  int channel_index = 0;     // position in the ordered basis, 0-based
};

/// Cartesian sampling grid: resolution x resolution samples spanning
/// [-half_width_radii*a, +half_width_radii*a] in both axes.
struct GridSpec {
  double half_width_radii = 1.5;
  int resolution = 512;

  bool operator==(const GridSpec&) const = default;
};

/// Ordered guided-mode basis of a fiber: l ascending, then m ascending,
/// cosine before sine. For l > 0 each (l, m) root contributes both
/// orientations.
struct ModeBasis {
  FiberSpec fiber;
  std::vector<LPMode> modes;
  GridSpec grid;

  int size() const { return static_cast<int>(modes.size()); }
};

/// Solves the weakly-guiding dispersion relation
///   u J_{l-1}(u)/J_l(u) = -w K_{l-1}(w)/K_l(w),  w = sqrt(V^2 - u^2)
/// for every azimuthal order, by bisection bracketed between consecutive
/// Bessel zeros (tolerance 1e-12 on u). Modes exactly at cutoff are
/// excluded. Throws if the fiber guides no mode at all.
ModeBasis solve_modes(const FiberSpec& fiber, const GridSpec& grid = {});

/// Unnormalized scalar mode field at polar position (r, phi):
/// J_l(u r/a) trig(l phi) in the core, matched K_l decay in the cladding.
double mode_field(const LPMode& mode, const FiberSpec& fiber, double r,
                  double phi);

/// Fraction of the mode power carried at radii >= rho * core_radius, by
/// radial quadrature of |field|^2 r dr out to 3 core radii (the azimuthal
/// factor cancels). quadrature_points is the sample count of the radial
/// rule; the result must agree with a half-resolution pass to 1e-6 or the
/// call fails with a grid diagnostic.
double edge_power_fraction(const LPMode& mode, const FiberSpec& fiber,
                           double rho, int quadrature_points = 4096);

/// Mode basis sampled on its grid; fields are L2-normalized over the grid.
/// Rows of `fields` are flattened row-major samples, one column per mode.
struct SampledBasis {
  ModeBasis basis;
  GridSpec grid;
  Eigen::MatrixXd fields;  // (resolution^2) x N, unit columns
};

SampledBasis sample_basis(const ModeBasis& basis);

/// Complex expansion coefficients of a sampled field in the mode basis:
/// coefficient i is the grid inner product with mode i's normalized field.
Eigen::VectorXcd decompose_field(const Eigen::MatrixXcd& field,
                                 const SampledBasis& sampled);
Eigen::VectorXcd decompose_field(const Eigen::MatrixXcd& field,
                                 const ModeBasis& basis);

/// Mode-table document: fiber parameters plus one record per mode
/// (l, m, orientation, u, w, channel_index, edge_power_fraction at rho).
void save_mode_report(const std::filesystem::path& path, const ModeBasis& basis,
                      double rho = 0.8);

std::string orientation_name(Orientation o);

}  // namespace fibersec
