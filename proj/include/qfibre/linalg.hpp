#pragma once

// Dense complex linear algebra used everywhere else: inner products,
// Hermitian/unitary checks, and the matrix exponential of -i*theta*H/hbar.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>

#include "qfibre/errors.hpp"

namespace qfibre {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace detail {
// %g keeps tiny defects and tolerances legible in error text, where
// std::to_string would print them as 0.000000.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace detail

// Defect norm used by every tolerance check: largest entry magnitude.
inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}
inline double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct Tolerances {
  double hermiticity = 1e-10;
  double unitarity = 1e-10;
  double equality = 1e-9;
};

// Hermitian inner product, conjugate-linear in the first argument.
inline Complex inner(const Vector& u, const Vector& v) {
  if (u.size() != v.size())
    throw DimensionError("inner: size mismatch " + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()));
  return u.dot(v);
}

inline Matrix dagger(const Matrix& a) { return a.adjoint(); }

inline double hermiticity_defect(const Matrix& a) {
  return max_abs(Matrix(a - a.adjoint()));
}

inline bool is_hermitian(const Matrix& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  return hermiticity_defect(a) <= tol;
}

inline double unitarity_defect(const Matrix& a) {
  return max_abs(Matrix(a.adjoint() * a - Matrix::Identity(a.rows(), a.cols())));
}

inline bool is_unitary(const Matrix& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  return unitarity_defect(a) <= tol;
}

// exp(-i*theta*H/hbar) for Hermitian H, via eigendecomposition so the
// result is unitary to roundoff regardless of theta. Sizes here are small
// (n <= 64), so the O(n^3) solve is not worth avoiding.
inline Matrix expm_hermitian_generator(const Matrix& h, double theta,
                                       double hbar = 1.0,
                                       double hermiticity_tol = 1e-10) {
  if (h.rows() != h.cols())
    throw DimensionError("expm_hermitian_generator: matrix not square");
  if (!(hbar > 0.0))
    throw UnitsError("expm_hermitian_generator: hbar must be positive, got " +
                     std::to_string(hbar));
  const double defect = hermiticity_defect(h);
  if (defect > hermiticity_tol)
    throw HermiticityError(
        "expm_hermitian_generator: generator defect " + detail::num(defect));
  // Within tolerance, define the result through the Hermitian part.
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (h + h.adjoint())));
  const Eigen::VectorXd& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    phases[k] = std::exp(Complex(0.0, -theta * lam[k] / hbar));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Mean value <psi|A psi> / <psi|psi>.
inline Complex expectation(const Matrix& a, const Vector& psi) {
  if (a.rows() != a.cols() || a.cols() != psi.size())
    throw DimensionError("expectation: operator is " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + ", state has " +
                         std::to_string(psi.size()) + " amplitudes");
  const double nrm2 = psi.squaredNorm();
  if (nrm2 == 0.0) throw ZeroNormError("expectation: zero state");
  return inner(psi, Vector(a * psi)) / nrm2;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Spin-j generators in the usual |j,m> basis with m descending, j=(n-1)/2.
// For n=2 these are the Pauli matrices over 2.
inline Matrix spin_plus(int n) {
  const double j = 0.5 * (n - 1);
  Matrix sp = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double m = j - i;
    sp(i - 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return sp;
}
inline Matrix spin_x(int n) {
  Matrix sp = spin_plus(n);
  return 0.5 * (sp + sp.adjoint());
}
inline Matrix spin_y(int n) {
  Matrix sp = spin_plus(n);
  return Complex(0, -0.5) * (sp - sp.adjoint());
}
inline Matrix spin_z(int n) {
  const double j = 0.5 * (n - 1);
  Matrix sz = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) sz(i, i) = j - i;
  return sz;
}

inline Matrix random_complex_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(r, c) = Complex(re, im);
    }
  return m;
}

inline Matrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix g = random_complex_matrix(n, rng);
  return 0.5 * (g + g.adjoint());
}

// Haar-ish random unitary: QR of a Gaussian matrix with the phase of the
// R diagonal pulled into Q so the result is a deterministic function of
// the seed alone.
inline Matrix random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix g = random_complex_matrix(n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline Vector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int k = 0; k < n; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v[k] = Complex(re, im);
  }
  return v;
}

// FNV-1a over raw bytes; used to derive per-point seeds from coordinates.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace qfibre
