#include "fibersec/fiber_modes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fibersec {

namespace {

double bessel_j(int l, double x) { return std::cyl_bessel_j(static_cast<double>(l), x); }
double bessel_k(int l, double x) { return std::cyl_bessel_k(static_cast<double>(l), x); }

// J_{-1}(x) = -J_1(x), K_{-1}(x) = K_1(x)
double bessel_j_lm1(int l, double x) { return l == 0 ? -bessel_j(1, x) : bessel_j(l - 1, x); }
double bessel_k_lm1(int l, double x) { return l == 0 ? bessel_k(1, x) : bessel_k(l - 1, x); }

// Scalar dispersion function whose roots are the guided u values:
//   F(u) = u J_{l-1}(u)/J_l(u) + w K_{l-1}(w)/K_l(w),  w = sqrt(V^2 - u^2).
double dispersion(int l, double u, double v) {
  const double w = std::sqrt(std::max(v * v - u * u, 0.0));
  const double jterm = u * bessel_j_lm1(l, u) / bessel_j(l, u);
  double kterm = 0.0;
  if (w > 0.0) kterm = w * bessel_k_lm1(l, w) / bessel_k(l, w);
  return jterm + kterm;
}

// Zeros of J_l inside (0, limit), by scan plus bisection. These are the
// poles of the dispersion function and bracket its roots.
std::vector<double> bessel_j_zeros(int l, double limit) {
  std::vector<double> zeros;
  const int scan = std::max(400, static_cast<int>(limit * 64));
  double prev_x = limit * 1e-9;
  double prev_f = bessel_j(l, prev_x);
  for (int i = 1; i <= scan; ++i) {
    const double x = limit * i / scan;
    const double f = bessel_j(l, x);
    if (f != 0.0 && prev_f != 0.0 && std::signbit(f) != std::signbit(prev_f)) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::signbit(bessel_j(l, mid)) == std::signbit(bessel_j(l, lo))) lo = mid;
        else hi = mid;
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = f;
  }
  return zeros;
}

// Bisection for a dispersion root inside a pole-free bracket.
double bisect_dispersion(int l, double lo, double hi, double v) {
  double flo = dispersion(l, lo, v);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = dispersion(l, mid, v);
    if (fmid == 0.0) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All guided u roots for azimuthal order l, ascending. The interval (0, V)
// is partitioned at the zeros of J_l; each pole-free subinterval is scanned
// for a sign change and bisected.
std::vector<double> solve_roots_for_l(int l, double v) {
  std::vector<double> edges{0.0};
  for (double z : bessel_j_zeros(l, v)) edges.push_back(z);
  edges.push_back(v);

  std::vector<double> roots;
  const double margin = v * 1e-10;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k] + margin;
    const double b = edges[k + 1] - margin;
    if (b <= a) continue;
    const int scan = 64;
    double prev_u = a;
    double prev_f = dispersion(l, prev_u, v);
    for (int i = 1; i <= scan; ++i) {
      const double u = a + (b - a) * i / scan;
      const double f = dispersion(l, u, v);
      if (std::isfinite(prev_f) && std::isfinite(f) &&
          std::signbit(f) != std::signbit(prev_f)) {
        roots.push_back(bisect_dispersion(l, prev_u, u, v));
      }
      prev_u = u;
      prev_f = f;
    }
  }
  std::sort(roots.begin(), roots.end());

  // drop cutoff-degenerate roots (w -> 0), they are not guided
  std::erase_if(roots, [&](double u) { return v * v - u * u <= (v * 1e-9) * (v * 1e-9); });
  return roots;
}

double radial_profile(const LPMode& mode, const FiberSpec& fiber, double r) {
  const double a = fiber.core_radius;
  if (r <= a) return bessel_j(mode.l, mode.u * r / a);
  const double scale = bessel_j(mode.l, mode.u) / bessel_k(mode.l, mode.w);
  return scale * bessel_k(mode.l, mode.w * r / a);
}

// Composite Simpson of |R(r)|^2 r dr on [r0, r1].
double power_integral(const LPMode& mode, const FiberSpec& fiber, double r0,
                      double r1, int points) {
  if (r1 <= r0) return 0.0;
  int n = std::max(points, 2);
  if (n % 2 != 0) ++n;
  const double h = (r1 - r0) / n;
  auto f = [&](double r) {
    const double amp = radial_profile(mode, fiber, r);
    return amp * amp * r;
  };
  double sum = f(r0) + f(r1);
  for (int i = 1; i < n; ++i) sum += f(r0 + h * i) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

double edge_fraction_pass(const LPMode& mode, const FiberSpec& fiber,
                          double rho, int points) {
  const double a = fiber.core_radius;
  const double r_split = rho * a;
  const double r_max = 3.0 * a;
  const int inner_pts = std::max(2, static_cast<int>(points * rho / 3.0));
  const int outer_pts = std::max(2, points - inner_pts);
  const double inner = power_integral(mode, fiber, 0.0, r_split, inner_pts);
  const double outer = power_integral(mode, fiber, r_split, r_max, outer_pts);
  const double total = inner + outer;
  if (total <= 0.0)
    throw std::runtime_error("edge_power_fraction: vanishing total power");
  return outer / total;
}

}  // namespace

void FiberSpec::validate() const {
  if (!(core_radius > 0.0)) throw std::invalid_argument("fiber: core_radius must be positive");
  if (!(numerical_aperture > 0.0)) throw std::invalid_argument("fiber: numerical_aperture must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("fiber: wavelength must be positive");
  if (!(core_index > 0.0)) throw std::invalid_argument("fiber: core_index must be positive");
  if (!(numerical_aperture < core_index)) throw std::invalid_argument("fiber: numerical_aperture must be below core_index");
}

double v_number(const FiberSpec& fiber) {
  fiber.validate();
  return 2.0 * M_PI * fiber.core_radius * fiber.numerical_aperture / fiber.wavelength;
}

ModeBasis solve_modes(const FiberSpec& fiber, const GridSpec& grid) {
  const double v = v_number(fiber);

  ModeBasis basis;
  basis.fiber = fiber;
  basis.grid = grid;

  for (int l = 0;; ++l) {
    const std::vector<double> roots = solve_roots_for_l(l, v);
    if (roots.empty() && l > 0) break;
    for (std::size_t m = 0; m < roots.size(); ++m) {
      LPMode mode;
      mode.l = l;
      mode.m = static_cast<int>(m) + 1;
      mode.u = roots[m];
      mode.w = std::sqrt(v * v - mode.u * mode.u);
      mode.orientation = Orientation::Cosine;
      basis.modes.push_back(mode);
      if (l > 0) {
        mode.orientation = Orientation::Sine;
        basis.modes.push_back(mode);
      }
    }
  }

  if (basis.modes.empty())
    throw std::runtime_error("solve_modes: fiber guides no mode (V = " +
                             std::to_string(v) + " below first cutoff)");

  std::sort(basis.modes.begin(), basis.modes.end(),
            [](const LPMode& a, const LPMode& b) {
              if (a.l != b.l) return a.l < b.l;
              if (a.m != b.m) return a.m < b.m;
              return a.orientation == Orientation::Cosine &&
                     b.orientation == Orientation::Sine;
            });
  for (std::size_t i = 0; i < basis.modes.size(); ++i)
    basis.modes[i].channel_index = static_cast<int>(i);
  return basis;
}

double mode_field(const LPMode& mode, const FiberSpec& fiber, double r,
                  double phi) {
  if (r < 0.0) throw std::invalid_argument("mode_field: negative radius");
  const double trig = mode.orientation == Orientation::Cosine
                          ? std::cos(mode.l * phi)
                          : std::sin(mode.l * phi);
  return radial_profile(mode, fiber, r) * trig;
}

double edge_power_fraction(const LPMode& mode, const FiberSpec& fiber,
                           double rho, int quadrature_points) {
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("edge_power_fraction: rho outside [0,1]");
  if (rho == 0.0) return 1.0;

  const double full = edge_fraction_pass(mode, fiber, rho, quadrature_points);
  const double half = edge_fraction_pass(mode, fiber, rho, quadrature_points / 2);
  if (std::abs(full - half) > 1e-6)
    throw std::runtime_error(
        "edge_power_fraction: quadrature not converged (" +
        std::to_string(quadrature_points) + " vs " +
        std::to_string(quadrature_points / 2) + " points differ by " +
        std::to_string(std::abs(full - half)) + ")");
  return full;
}

SampledBasis sample_basis(const ModeBasis& basis) {
  const int res = basis.grid.resolution;
  const double a = basis.fiber.core_radius;
  const double half = basis.grid.half_width_radii * a;
  const int n_modes = basis.size();
  if (n_modes == 0) throw std::invalid_argument("sample_basis: empty basis");

  // radial lookup per unique (l, m) root; orientations share the profile
  const double r_max = half * std::sqrt(2.0) * 1.001;
  const int lut_n = 16384;
  std::vector<std::vector<double>> luts;
  std::vector<int> lut_of_mode(n_modes);
  std::vector<std::pair<int, double>> lut_key;  // (l, u)
  for (int k = 0; k < n_modes; ++k) {
    const LPMode& mode = basis.modes[k];
    int found = -1;
    for (std::size_t j = 0; j < lut_key.size(); ++j)
      if (lut_key[j].first == mode.l && lut_key[j].second == mode.u) {
        found = static_cast<int>(j);
        break;
      }
    if (found < 0) {
      std::vector<double> lut(lut_n + 1);
      for (int i = 0; i <= lut_n; ++i)
        lut[i] = radial_profile(mode, basis.fiber, r_max * i / lut_n);
      luts.push_back(std::move(lut));
      lut_key.emplace_back(mode.l, mode.u);
      found = static_cast<int>(luts.size()) - 1;
    }
    lut_of_mode[k] = found;
  }

  SampledBasis out;
  out.basis = basis;
  out.grid = basis.grid;
  out.fields.resize(static_cast<Eigen::Index>(res) * res, n_modes);

  std::vector<double> xs(res);
  for (int i = 0; i < res; ++i) xs[i] = -half + 2.0 * half * i / (res - 1);

  // flattening matches Eigen's column-major field.data(): index = ix*res + iy
  // for a field(iy, ix) sampled at (x = xs[ix], y = xs[iy])
  for (int k = 0; k < n_modes; ++k) {
    const LPMode& mode = basis.modes[k];
    const std::vector<double>& lut = luts[lut_of_mode[k]];
    Eigen::Index idx = 0;
    for (int ix = 0; ix < res; ++ix) {
      const double x = xs[ix];
      for (int iy = 0; iy < res; ++iy, ++idx) {
        const double y = xs[iy];
        const double r = std::hypot(x, y);
        const double t = std::min(r / r_max, 1.0) * lut_n;
        const int i0 = std::min(static_cast<int>(t), lut_n - 1);
        const double frac = t - i0;
        const double radial = lut[i0] + frac * (lut[i0 + 1] - lut[i0]);
        const double phi = std::atan2(y, x);
        const double trig = mode.orientation == Orientation::Cosine
                                ? std::cos(mode.l * phi)
                                : std::sin(mode.l * phi);
        out.fields(idx, k) = radial * trig;
      }
    }
    const double norm = out.fields.col(k).norm();
    if (norm <= 0.0) throw std::runtime_error("sample_basis: degenerate mode sample");
    out.fields.col(k) /= norm;
  }
  return out;
}

Eigen::VectorXcd decompose_field(const Eigen::MatrixXcd& field,
                                 const SampledBasis& sampled) {
  const int res = sampled.grid.resolution;
  if (field.rows() != res || field.cols() != res)
    throw std::invalid_argument("decompose_field: field grid does not match basis grid");

  Eigen::Map<const Eigen::VectorXcd> flat(field.data(), field.size());
  // fields are real; the adjoint inner product splits into two real products
  const Eigen::VectorXd flat_re = flat.real();
  const Eigen::VectorXd flat_im = flat.imag();
  const Eigen::VectorXd re = sampled.fields.transpose() * flat_re;
  const Eigen::VectorXd im = sampled.fields.transpose() * flat_im;
  Eigen::VectorXcd coeffs(re.size());
  coeffs.real() = re;
  coeffs.imag() = im;
  return coeffs;
}

Eigen::VectorXcd decompose_field(const Eigen::MatrixXcd& field,
                                 const ModeBasis& basis) {
  return decompose_field(field, sample_basis(basis));
}

std::string orientation_name(Orientation o) {
  return o == Orientation::Cosine ? "cos" : "sin";
}

void save_mode_report(const std::filesystem::path& path, const ModeBasis& basis,
                      double rho) {
  nlohmann::json doc;
  doc["fiber"] = {{"core_radius_m", basis.fiber.core_radius},
                  {"numerical_aperture", basis.fiber.numerical_aperture},
                  {"wavelength_m", basis.fiber.wavelength},
                  {"core_index", basis.fiber.core_index}};
  doc["v_number"] = v_number(basis.fiber);
  doc["mode_count"] = basis.size();
  doc["edge_rho"] = rho;

  auto& modes = doc["modes"];
  modes = nlohmann::json::array();
  for (const LPMode& mode : basis.modes) {
    modes.push_back({{"channel_index", mode.channel_index + 1},
                     {"l", mode.l},
                     {"m", mode.m},
                     {"orientation", orientation_name(mode.orientation)},
                     {"u", mode.u},
                     {"w", mode.w},
                     {"edge_power_fraction",
                      edge_power_fraction(mode, basis.fiber, rho)}});
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("save_mode_report: cannot open " + tmp.string());
    out << doc.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fibersec
