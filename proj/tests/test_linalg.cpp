#include <catch2/catch_amalgamated.hpp>

#include "qfibre/linalg.hpp"
#include "support.hpp"

using namespace qfibre;
using qtest::diff;

TEST_CASE("inner product is conjugate-linear in the first slot", "[linalg]") {
  Vector u(2), v(2);
  u << Complex(1, 0), Complex(0, 2);
  v << Complex(3, 0), Complex(1, 0);
  CHECK(inner(u, v) == Complex(3, -2));

  Vector w(3);
  CHECK_THROWS_AS(inner(u, w), DimensionError);

  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    Vector a = random_state(4, rng);
    Vector b = random_state(4, rng);
    Complex lam(0.3, -1.2);
    CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-12);
    CHECK(std::abs(inner(Vector(lam * a), b) - std::conj(lam) * inner(a, b)) <
          1e-12);
    CHECK(std::abs(inner(a, Vector(lam * b)) - lam * inner(a, b)) < 1e-12);
    CHECK(inner(a, a).real() >= 0.0);
    CHECK(std::abs(inner(a, a).imag()) < 1e-12);
  }
}

TEST_CASE("dagger is the conjugate transpose and an involution", "[linalg]") {
  Matrix a(2, 2);
  a << Complex(0, 1), Complex(2, 0), Complex(3, 0), Complex(0, -1);
  Matrix expected(2, 2);
  expected << Complex(0, -1), Complex(3, 0), Complex(2, 0), Complex(0, 1);
  CHECK(diff(dagger(a), expected) == 0.0);

  std::mt19937_64 rng(102);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix m = random_complex_matrix(5, rng);
    CHECK(diff(dagger(dagger(m)), m) == 0.0);
    Matrix n = random_complex_matrix(5, rng);
    // (MN)^dag = N^dag M^dag
    CHECK(diff(dagger(Matrix(m * n)), Matrix(dagger(n) * dagger(m))) < 1e-12);
  }
}

TEST_CASE("hermiticity predicate tracks the tolerance", "[linalg]") {
  Matrix perturbed = pauli_x();
  perturbed(0, 1) += Complex(1e-8, 0);
  CHECK_FALSE(is_hermitian(perturbed, 1e-10));
  CHECK(is_hermitian(perturbed, 1e-6));
  CHECK(is_hermitian(pauli_x()));
  CHECK(is_hermitian(pauli_y()));
  CHECK(is_hermitian(pauli_z()));
  CHECK_FALSE(is_hermitian(Matrix::Zero(2, 3)));
}

TEST_CASE("unitarity predicate accepts rotations and rejects stretches",
          "[linalg]") {
  // exp(-i*0.35*sigma_y) written out by hand: a real rotation by 0.35.
  const double th = 0.35;
  Matrix rot(2, 2);
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  CHECK(is_unitary(rot, 1e-12));
  CHECK(diff(expm_hermitian_generator(pauli_y(), th), rot) < 1e-14);

  Matrix stretch = Matrix::Identity(2, 2) * 1.001;
  CHECK_FALSE(is_unitary(stretch, 1e-10));

  std::mt19937_64 rng(103);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    CHECK(is_unitary(random_unitary(4, s), 1e-12));
  }
}

TEST_CASE("matrix exponential of a Hermitian generator", "[linalg]") {
  SECTION("diagonal generator gives bare phases") {
    const double omega = 1.3, t = 0.7, hb = 2.0;
    Matrix h = 0.5 * hb * omega * pauli_z();
    Matrix u = expm_hermitian_generator(h, t, hb);
    Matrix expected(2, 2);
    expected << std::exp(Complex(0, -omega * t / 2)), 0, 0,
        std::exp(Complex(0, omega * t / 2));
    CHECK(diff(u, expected) < 1e-14);
  }
  SECTION("pi pulse around x flips the sign of everything") {
    const double pi = std::acos(-1.0);
    // sigma_x squares to 1, so exp(-i*pi*sigma_x) = cos(pi) I = -I.
    CHECK(diff(expm_hermitian_generator(pauli_x(), pi),
               Matrix(-Matrix::Identity(2, 2))) < 1e-14);
  }
  SECTION("result is unitary and satisfies the group property") {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (std::uint64_t s = 1; s <= 25; ++s) {
      const int n = 2 + int(s % 5);
      Matrix h = random_hermitian(n, 7000 + s);
      const double t1 = angle(rng), t2 = angle(rng);
      Matrix u1 = expm_hermitian_generator(h, t1);
      CHECK(unitarity_defect(u1) <= n * 2.2e-16 * 100);
      Matrix u2 = expm_hermitian_generator(h, t2);
      Matrix u12 = expm_hermitian_generator(h, t1 + t2);
      CHECK(diff(Matrix(u1 * u2), u12) < 1e-12);
      CHECK(diff(expm_hermitian_generator(h, 0.0),
                 Matrix(Matrix::Identity(n, n))) < 1e-13);
    }
  }
  SECTION("rejects bad input") {
    Matrix skew(2, 2);
    skew << Complex(0, 1), 1, 0, 0;
    CHECK_THROWS_AS(expm_hermitian_generator(skew, 1.0), HermiticityError);
    CHECK_THROWS_AS(expm_hermitian_generator(pauli_z(), 1.0, 0.0), UnitsError);
    CHECK_THROWS_AS(expm_hermitian_generator(pauli_z(), 1.0, -1.0), UnitsError);
    CHECK_THROWS_AS(expm_hermitian_generator(Matrix::Zero(2, 3), 1.0),
                    DimensionError);
  }
}

TEST_CASE("expectation values", "[linalg]") {
  Vector plus(2);
  plus << 1, 1;
  plus /= std::sqrt(2.0);
  CHECK(std::abs(expectation(pauli_x(), plus) - Complex(1, 0)) < 1e-14);

  // Normalization is applied internally, so scaling the state is a no-op.
  Vector scaled = plus * Complex(0.3, 1.7);
  CHECK(std::abs(expectation(pauli_x(), scaled) - Complex(1, 0)) < 1e-14);

  CHECK_THROWS_AS(expectation(pauli_x(), Vector(Vector::Zero(2))),
                  ZeroNormError);
  CHECK_THROWS_AS(expectation(pauli_x(), Vector(Vector::Zero(3))),
                  DimensionError);

  std::mt19937_64 rng(105);
  for (int rep = 0; rep < 30; ++rep) {
    Matrix h = random_hermitian(4, 9100 + rep);
    Vector psi = qtest::normalized_random_state(4, rng);
    CHECK(std::abs(expectation(h, psi).imag()) < 1e-12);
  }
}

TEST_CASE("spin generators obey the angular momentum algebra", "[linalg]") {
  CHECK(diff(spin_x(2), Matrix(0.5 * pauli_x())) < 1e-15);
  CHECK(diff(spin_y(2), Matrix(0.5 * pauli_y())) < 1e-15);
  CHECK(diff(spin_z(2), Matrix(0.5 * pauli_z())) < 1e-15);
  for (int n : {2, 3, 4, 7}) {
    Matrix sx = spin_x(n), sy = spin_y(n), sz = spin_z(n);
    CHECK(is_hermitian(sx, 1e-12));
    CHECK(is_hermitian(sy, 1e-12));
    CHECK(is_hermitian(sz, 1e-12));
    CHECK(diff(Matrix(sx * sy - sy * sx), Matrix(Complex(0, 1) * sz)) < 1e-12);
    CHECK(diff(Matrix(sy * sz - sz * sy), Matrix(Complex(0, 1) * sx)) < 1e-12);
    CHECK(diff(Matrix(sz * sx - sx * sz), Matrix(Complex(0, 1) * sy)) < 1e-12);
  }
}

TEST_CASE("seeded generators are reproducible", "[linalg]") {
  CHECK(diff(random_unitary(5, 42), random_unitary(5, 42)) == 0.0);
  CHECK(diff(random_hermitian(5, 42), random_hermitian(5, 42)) == 0.0);
  CHECK(diff(random_unitary(5, 42), random_unitary(5, 43)) > 1e-3);
  CHECK(is_hermitian(random_hermitian(6, 9), 1e-15));
}
