// Independent reference implementations used only by tests. These verify
// the library through a second numerical route and must stay free of the
// production code paths they check: the eigensolver is a hand-rolled
// complex Jacobi iteration, the linear solver a plain Gaussian elimination.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace oracles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
// Returns them sorted descending.
inline std::vector<double> hermitian_eigenvalues_jacobi(Matrix a,
                                                        double tol = 1e-13,
                                                        int max_sweeps = 100) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("jacobi: square matrices only");

  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) < tol * scale) break;

    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const Complex z = a(p, q);
        const double zmag = std::abs(z);
        if (zmag < 1e-300) continue;
        const Complex phase = z / zmag;  // strip the complex phase first
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * zmag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // columns of the rotation: G(:,p) = (c, -s*conj(phase)),
        // G(:,q) = (s*phase, c) in the (p,q) plane
        for (int k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
        a(p, q) = Complex(0, 0);
        a(q, p) = Complex(0, 0);
      }
  }

  std::vector<double> eigenvalues(n);
  for (int i = 0; i < n; ++i) eigenvalues[i] = a(i, i).real();
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  return eigenvalues;
}

// Solves A X = B by Gaussian elimination with partial pivoting.
inline Matrix gaussian_solve(Matrix a, Matrix b) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.rows() != n)
    throw std::invalid_argument("gaussian_solve: dimension mismatch");

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
    if (std::abs(a(pivot, col)) == 0.0)
      throw std::runtime_error("gaussian_solve: singular matrix");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      b.row(pivot).swap(b.row(col));
    }
    for (int row = col + 1; row < n; ++row) {
      const Complex factor = a(row, col) / a(col, col);
      if (factor == Complex(0, 0)) continue;
      a.row(row).tail(n - col) -= factor * a.row(col).tail(n - col);
      b.row(row) -= factor * b.row(col);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    b.row(col) /= a(col, col);
    for (int row = 0; row < col; ++row)
      b.row(row) -= a(row, col) * b.row(col);
  }
  return b;
}

// Tikhonov inverse through the normal equations: (A^H A + alpha^2 I)^-1 A^H.
inline Matrix normal_equations_inverse(const Matrix& a, double alpha) {
  const int n = static_cast<int>(a.cols());
  Matrix lhs = a.adjoint() * a;
  for (int i = 0; i < n; ++i) lhs(i, i) += alpha * alpha;
  return gaussian_solve(std::move(lhs), a.adjoint());
}

// One-sample Kolmogorov-Smirnov statistic against a uniform law on [lo, hi].
inline double ks_uniform_statistic(std::vector<double> samples, double lo,
                                   double hi) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = (samples[i] - lo) / (hi - lo);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample_statistic(std::vector<double> a,
                                      std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

inline std::vector<double> ranks(const std::vector<double>& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return values[x] < values[y]; });
  std::vector<double> rank(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

// Spearman rank correlation with average ranks for ties.
inline double spearman_rho(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman_rho: bad input");
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1) / 2.0;
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (rx[i] - mean) * (ry[i] - mean);
    dx += (rx[i] - mean) * (rx[i] - mean);
    dy += (ry[i] - mean) * (ry[i] - mean);
  }
  return num / std::sqrt(dx * dy);
}

}  // namespace oracles
