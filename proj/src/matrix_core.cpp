#include "fibersec/matrix_core.hpp"

#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <json.hpp>

namespace fibersec {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

ComplexMatrix gaussian_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

}  // namespace

SvdFactors svd(const ComplexMatrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "svd: empty matrix");
  require(m.allFinite(), "svd: non-finite entries");
  Eigen::JacobiSVD<ComplexMatrix> dec(m,
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.u = dec.matrixU();
  f.singular_values = dec.singularValues();
  f.v_adjoint = dec.matrixV().adjoint();

  const double rel =
      (f.reconstruct() - m).norm() / std::max(m.norm(), 1e-300);
  if (m.norm() > 0 && rel > 1e-10)
    throw std::runtime_error("svd: reconstruction error " + std::to_string(rel) +
                             " exceeds tolerance after " +
                             std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " decomposition");
  return f;
}

double resolve_alpha(const AlphaRule& rule, const SvdFactors& factors) {
  if (rule.kind == AlphaRule::Kind::Fixed) {
    require(rule.value >= 0.0, "alpha: negative regularization");
    return rule.value;
  }
  return 0.12 * factors.singular_values(0);
}

namespace {

ComplexMatrix apply_tikhonov_filter(const SvdFactors& f, double alpha) {
  require(alpha >= 0.0, "tikhonov_inverse: negative alpha");
  if (alpha == 0.0 && f.singular_values(0) == 0.0)
    throw std::invalid_argument(
        "tikhonov_inverse: all-zero matrix with alpha = 0 has no inverse");

  RealVector filtered(f.singular_values.size());
  const double a2 = alpha * alpha;
  for (Eigen::Index i = 0; i < filtered.size(); ++i) {
    const double s = f.singular_values(i);
    filtered(i) = (s == 0.0 && alpha == 0.0) ? 0.0 : s / (s * s + a2);
  }
  return f.v_adjoint.adjoint() * filtered.asDiagonal() * f.u.adjoint();
}

}  // namespace

ComplexMatrix tikhonov_inverse(const ComplexMatrix& m, double alpha) {
  return apply_tikhonov_filter(svd(m), alpha);
}

ComplexMatrix tikhonov_inverse(const ComplexMatrix& m, const AlphaRule& rule) {
  const SvdFactors f = svd(m);
  return apply_tikhonov_filter(f, resolve_alpha(rule, f));
}

ComplexMatrix haar_unitary(int n, Seed seed) {
  require(n >= 1, "haar_unitary: n must be positive");
  Rng rng(seed);
  ComplexMatrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // phase correction makes the distribution Haar rather than QR-convention
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag == 0.0) ? 1.0 : d / mag;
  }
  return q;
}

ComplexMatrix coupled_unitary(int n, double epsilon, Seed seed) {
  require(n >= 1, "coupled_unitary: n must be positive");
  require(epsilon >= 0.0, "coupled_unitary: negative epsilon");
  if (epsilon == 0.0) return ComplexMatrix::Identity(n, n);

  Rng rng(seed);
  ComplexMatrix a = gaussian_matrix(n, n, rng);
  // Hermitian with ~unit spectral radius (semicircle radius 2 sqrt(n) for
  // unit-variance entries), so epsilon is the phase spread in radians and
  // the mixing keeps growing through epsilon ~ pi instead of saturating
  ComplexMatrix g = (a + a.adjoint()) / (4.0 * std::sqrt(static_cast<double>(n)));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
  require(es.info() == Eigen::Success, "coupled_unitary: eigensolver failed");

  ComplexVector phases(n);
  for (int i = 0; i < n; ++i) {
    const double theta = epsilon * es.eigenvalues()(i);
    phases(i) = std::complex<double>(std::cos(theta), std::sin(theta));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix emulate_measurement(const ComplexMatrix& m, double sigma_meas,
                                  Seed seed) {
  require(sigma_meas >= 0.0, "emulate_measurement: negative sigma");
  if (sigma_meas == 0.0) return m;

  const double rms =
      m.norm() / std::sqrt(static_cast<double>(m.rows() * m.cols()));
  const double std_per_component = sigma_meas * rms;

  Rng rng(seed);
  ComplexMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) += std_per_component * rng.complex_gaussian();
  return out;
}

ComplexVector normalize_unit(const ComplexVector& x) {
  const double n = x.norm();
  require(n > 0.0, "normalize_unit: zero vector");
  return x / n;
}

ComplexVector normalize_precoded(const ComplexVector& x_hat,
                                 const ComplexMatrix& t_inv) {
  require(t_inv.rows() == t_inv.cols(), "normalize_precoded: non-square t_inv");
  const double divisor = t_inv.norm();  // sqrt(tr(A A^H)) = Frobenius norm
  require(divisor > 0.0, "normalize_precoded: zero-trace denominator");
  return x_hat / divisor;
}

double precoding_efficiency(const ComplexMatrix& t_diag) {
  require(t_diag.rows() == t_diag.cols(), "precoding_efficiency: non-square");
  const Eigen::Index n = t_diag.rows();
  if (n == 1) return 1.0;

  double diag_power = 0.0, back_power = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = std::norm(t_diag(i, j));
      (i == j ? diag_power : back_power) += p;
    }
  const double mean_d = diag_power / static_cast<double>(n);
  const double mean_b = back_power / static_cast<double>(n * (n - 1));
  if (mean_d + mean_b == 0.0) return 0.0;
  return mean_d / (mean_d + mean_b);
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m,
                 const std::string& basis) {
  require(m.rows() == m.cols(), "save_matrix: only square matrices");
  nlohmann::json doc;
  doc["n"] = m.rows();
  doc["basis"] = basis;
  auto& data = doc["data"];
  data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("save_matrix: cannot open " + tmp.string());
    out << doc.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

ComplexMatrix load_matrix(const std::filesystem::path& path,
                          std::string* basis_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in);

  const Eigen::Index n = doc.at("n").get<Eigen::Index>();
  require(n >= 1, "load_matrix: dimension must be positive");
  const auto& data = doc.at("data");
  require(static_cast<Eigen::Index>(data.size()) == n * n,
          "load_matrix: data length does not match n*n");
  if (basis_out) *basis_out = doc.value("basis", std::string{});

  ComplexMatrix m(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j, ++k)
      m(i, j) = {data[k].at(0).get<double>(), data[k].at(1).get<double>()};
  require(m.allFinite(), "load_matrix: non-finite entries");
  return m;
}

}  // namespace fibersec
