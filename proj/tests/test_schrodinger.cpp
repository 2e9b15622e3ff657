#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qfibre/propagator.hpp"
#include "support.hpp"

using namespace qfibre;
using qtest::diff;

namespace {
const double kPi = std::acos(-1.0);

// exp(-i*theta*sigma) for an involutory sigma, written out by hand so the
// expm tests have an independent reference.
Matrix rot(const Matrix& sigma, double theta) {
  return std::cos(theta) * Matrix::Identity(2, 2) -
         Complex(0, 1) * std::sin(theta) * sigma;
}
}  // namespace

TEST_CASE("hamiltonian families follow their defining forms", "[schrodinger]") {
  SECTION("constant") {
    auto h = TimeDependentHamiltonian::constant(pauli_z(), 0.0, 2.0);
    CHECK(diff(h.at(0.0), pauli_z()) == 0.0);
    CHECK(diff(h.at(1.7), pauli_z()) == 0.0);
    CHECK_THROWS_AS(h.at(2.5), DomainError);
    CHECK_THROWS_AS(h.at(-0.1), DomainError);
    CHECK_THROWS_AS(TimeDependentHamiltonian::constant(pauli_z(), 0.0, 1.0, 0.0),
                    UnitsError);
    CHECK_THROWS_AS(TimeDependentHamiltonian::constant(pauli_z(), 1.0, 1.0),
                    DomainError);
  }
  SECTION("piecewise constant uses half-open cells") {
    auto h = TimeDependentHamiltonian::piecewise_constant(
        {0.0, 1.0, 2.0}, {pauli_z(), pauli_x()});
    CHECK(diff(h.at(0.5), pauli_z()) == 0.0);
    CHECK(diff(h.at(0.0), pauli_z()) == 0.0);
    CHECK(diff(h.at(1.0), pauli_x()) == 0.0);
    CHECK(diff(h.at(2.0), pauli_x()) == 0.0);
    CHECK_THROWS_AS(TimeDependentHamiltonian::piecewise_constant(
                        {0.0, 0.0, 1.0}, {pauli_z(), pauli_x()}),
                    DomainError);
  }
  SECTION("two-level drive at t=0 and at generic t") {
    auto h = TimeDependentHamiltonian::two_level_drive(1.4, 0.6, 2.2, -1.0, 1.0);
    Matrix at0 = 0.5 * 1.4 * pauli_z() + 0.5 * 0.6 * pauli_x();
    CHECK(diff(h.at(0.0), at0) == 0.0);
    const double t = 0.37;
    Matrix expected = 0.5 * 1.4 * pauli_z() +
                      0.5 * 0.6 * (std::cos(2.2 * t) * pauli_x() +
                                   std::sin(2.2 * t) * pauli_y());
    CHECK(diff(h.at(t), expected) < 1e-15);
    CHECK(is_hermitian(h.at(0.9), 1e-14));
    // entries scale with hbar, frequencies do not
    auto h2 = TimeDependentHamiltonian::two_level_drive(1.4, 0.6, 2.2, -1.0, 1.0, 3.0);
    CHECK(diff(h2.at(t), Matrix(3.0 * h.at(t))) < 1e-15);
  }
  SECTION("tabulated interpolates linearly and validates hermiticity") {
    Matrix a = pauli_z(), b = pauli_x();
    auto h = TimeDependentHamiltonian::tabulated({0.0, 1.0}, {a, b});
    CHECK(diff(h.at(0.25), Matrix(0.75 * a + 0.25 * b)) < 1e-15);
    Matrix bad = pauli_x();
    bad(0, 1) += Complex(0, 1e-3);
    auto hb = TimeDependentHamiltonian::tabulated({0.0, 1.0}, {a, bad});
    CHECK_THROWS_AS(hb.at(0.9), HermiticityError);
    CHECK_NOTHROW(hb.at(0.0));
  }
  SECTION("corruption is caught unless the tolerance is loosened") {
    auto strict = TimeDependentHamiltonian::constant(pauli_z(), 0.0, 1.0);
    strict.set_corruption(1e-4);
    CHECK_THROWS_AS(strict.at(0.5), HermiticityError);
    auto loose = TimeDependentHamiltonian::constant(pauli_z(), 0.0, 1.0, 1.0, 1e-3);
    loose.set_corruption(1e-4);
    Matrix m = loose.at(0.5);
    CHECK(m(0, 0).imag() == 1e-4);
  }
}

TEST_CASE("exact propagator for constant generators", "[schrodinger]") {
  const double omega = 1.3, hb = 2.0;
  auto h = TimeDependentHamiltonian::constant(Matrix(0.5 * hb * omega * pauli_z()),
                                              0.0, 4.0, hb);
  Propagator u(h, 0.0, 4.0, {Scheme::exact_constant, 8});

  const double t = 1.9;
  Matrix expected(2, 2);
  expected << std::exp(Complex(0, -omega * t / 2)), 0, 0,
      std::exp(Complex(0, omega * t / 2));
  CHECK(diff(u.at(t), expected) < 1e-14);

  // group property holds off the grid as well
  CHECK(composition_defect(u, 0.3, 1.234567, 3.9) < 1e-14);
  CHECK(diff(u(1.1, 2.7), Matrix(u(2.7, 1.1).adjoint())) < 1e-14);
  CHECK(diff(u(2.0, 2.0), Matrix(Matrix::Identity(2, 2))) == 0.0);
  CHECK_THROWS_AS(u(4.5, 0.0), DomainError);

  auto drive = TimeDependentHamiltonian::two_level_drive(1.0, 1.0, 1.0, 0.0, 1.0);
  CHECK_THROWS_AS(Propagator(drive, 0.0, 1.0, {Scheme::exact_constant, 8}),
                  MethodMismatchError);
  CHECK_THROWS_AS(Propagator(h, 0.0, 1.0, {Scheme::exact_constant, 0}),
                  DomainError);
}

TEST_CASE("exact propagator for piecewise generators", "[schrodinger]") {
  auto h = TimeDependentHamiltonian::piecewise_constant(
      {0.0, 1.0, 2.0}, {pauli_z(), pauli_x()});
  Propagator u(h, 0.0, 2.0, {Scheme::exact_constant, 4});

  CHECK(diff(u.at(2.0), Matrix(rot(pauli_x(), 1.0) * rot(pauli_z(), 1.0))) < 1e-14);
  CHECK(diff(u(1.5, 0.5), Matrix(rot(pauli_x(), 0.5) * rot(pauli_z(), 0.5))) < 1e-14);
  CHECK(diff(u(0.75, 0.25), rot(pauli_z(), 0.5)) < 1e-14);
  CHECK(composition_defect(u, 0.2, 1.0, 1.8) < 1e-14);
  CHECK(composition_defect(u, 0.2, 0.9313, 1.8) < 1e-14);
  // backward query inverts the forward product
  CHECK(diff(Matrix(u(0.3, 1.7) * u(1.7, 0.3)), Matrix(Matrix::Identity(2, 2))) <
        1e-14);
}

TEST_CASE("magnus midpoint scheme", "[schrodinger]") {
  SECTION("constant generator is integrated exactly per step") {
    auto h = TimeDependentHamiltonian::constant(random_hermitian(3, 11), 0.0, 2.0);
    Propagator u(h, 0.0, 2.0, {Scheme::magnus_midpoint, 100});
    CHECK(diff(u.at(2.0), closed_form_propagator(h, 2.0, 0.0)) < 1e-13);
  }
  SECTION("grid-aligned composition is a partial product") {
    auto h = TimeDependentHamiltonian::two_level_drive(2.0, 1.0, 2.0, 0.0, kPi);
    Propagator u(h, 0.0, kPi, {Scheme::magnus_midpoint, 256});
    const auto& g = u.grid();
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    for (int rep = 0; rep < 40; ++rep) {
      std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
      CHECK(composition_defect(u, g[i], g[j], g[k]) <= 1e-12);
    }
    CHECK(diff(u.at(g[256]), u(g[256], g[0])) == 0.0);
  }
  SECTION("off-grid composition defect decays one order faster than the method") {
    // Measured on this fixture: defect 2.7e-6 at 100 steps, shrinking by
    // ~8x per step doubling (the straddled cell contributes a single
    // third-order local error). Frozen as a regression band.
    auto h = TimeDependentHamiltonian::two_level_drive(2.0, 1.0, 2.0, 0.0, kPi);
    double defect[2];
    int idx = 0;
    for (int steps : {100, 200}) {
      Propagator u(h, 0.0, kPi, {Scheme::magnus_midpoint, steps});
      const auto& g = u.grid();
      double t2 = 0.5 * (g[steps / 2] + g[steps / 2 + 1]);
      defect[idx++] = composition_defect(u, g[10], t2, g[steps - 10]);
    }
    CHECK(defect[0] > 1e-6);
    CHECK(defect[0] < 1e-5);
    const double ratio = defect[0] / defect[1];
    CHECK(ratio > 6.0);
    CHECK(ratio < 10.0);
  }
  SECTION("second order against the closed-form drive propagator") {
    auto h = TimeDependentHamiltonian::two_level_drive(2.0, 1.0, 2.0, 0.0, kPi);
    const Matrix ref = closed_form_propagator(h, kPi, 0.0);
    double e256 = 0, e512 = 0;
    {
      Propagator u(h, 0.0, kPi, {Scheme::magnus_midpoint, 256});
      e256 = diff(u.at(kPi), ref);
    }
    {
      Propagator u(h, 0.0, kPi, {Scheme::magnus_midpoint, 512});
      e512 = diff(u.at(kPi), ref);
    }
    const double order = std::log2(e256 / e512);
    CHECK(order > 1.75);
    CHECK(order < 2.25);
  }
  SECTION("unitary on and off the grid") {
    auto h = TimeDependentHamiltonian::two_level_drive(1.0, 0.8, 1.7, 0.0, 2.0);
    Propagator u(h, 0.0, 2.0, {Scheme::magnus_midpoint, 64});
    CHECK(unitarity_defect(u.at(2.0)) < 1e-12);
    CHECK(unitarity_defect(u(1.234, 0.456)) < 1e-12);
  }
}

TEST_CASE("crank-nicolson scheme", "[schrodinger]") {
  auto h = TimeDependentHamiltonian::two_level_drive(2.0, 1.0, 2.0, 0.0, kPi);
  SECTION("unitary by construction even at coarse steps") {
    Propagator u(h, 0.0, kPi, {Scheme::crank_nicolson, 16});
    CHECK(unitarity_defect(u.at(kPi)) < 1e-13);
  }
  SECTION("second order") {
    const Matrix ref = closed_form_propagator(h, kPi, 0.0);
    Propagator ua(h, 0.0, kPi, {Scheme::crank_nicolson, 256});
    Propagator ub(h, 0.0, kPi, {Scheme::crank_nicolson, 512});
    const double order = std::log2(diff(ua.at(kPi), ref) / diff(ub.at(kPi), ref));
    CHECK(order > 1.75);
    CHECK(order < 2.25);
  }
}

TEST_CASE("euler scheme leaks norm, which is the point", "[schrodinger]") {
  auto h = TimeDependentHamiltonian::constant(pauli_x(), 0.0, kPi);
  Propagator u(h, 0.0, kPi, {Scheme::euler_unstable, 1000});
  Vector psi0(2);
  psi0 << 1, 0;
  const double drift = std::abs((u.at(kPi) * psi0).squaredNorm() - 1.0);
  CHECK(drift > 1e-3);

  Propagator u100(h, 0.0, kPi, {Scheme::euler_unstable, 100});
  auto d = inverse_identity_defect(u100, 0.0, kPi);
  CHECK(d.inverse_defect < 1e-12);  // backward queries invert the product
  CHECK(d.adjoint_defect > 1e-2);   // but the product is far from unitary
}

TEST_CASE("inverse and adjoint defects vanish for unitary schemes",
          "[schrodinger]") {
  auto h = TimeDependentHamiltonian::two_level_drive(0.4, 1.1, 0.9, 0.0, 3.0);
  for (Scheme s : {Scheme::magnus_midpoint, Scheme::crank_nicolson}) {
    Propagator u(h, 0.0, 3.0, {s, 128});
    const auto& g = u.grid();
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    for (int rep = 0; rep < 25; ++rep) {
      std::size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      auto d = inverse_identity_defect(u, g[i], g[j]);
      CHECK(d.inverse_defect <= 1e-10);
      CHECK(d.adjoint_defect <= 1e-10);
    }
  }
}

TEST_CASE("hamiltonian recovery from the propagator", "[schrodinger]") {
  SECTION("constant generator, exact scheme") {
    auto h = TimeDependentHamiltonian::constant(pauli_z(), 0.0, 2.0);
    Propagator u(h, 0.0, 2.0, {Scheme::exact_constant, 16});
    CHECK(diff(recover_hamiltonian(u, 0.7, 1e-4), pauli_z()) < 1e-8);
    CHECK_THROWS_AS(recover_hamiltonian(u, 0.0, 1e-4), DomainError);
    CHECK_THROWS_AS(recover_hamiltonian(u, 0.7, 0.0), DomainError);
  }
  SECTION("zero generator recovers exactly zero") {
    auto h = TimeDependentHamiltonian::constant(Matrix(Matrix::Zero(2, 2)), 0.0, 1.0);
    Propagator u(h, 0.0, 1.0, {Scheme::exact_constant, 4});
    CHECK(max_abs(recover_hamiltonian(u, 0.5, 1e-4)) < 1e-12);
  }
  SECTION("driven generator through the magnus propagator") {
    auto h = TimeDependentHamiltonian::two_level_drive(2.0, 0.7, 1.3, 0.0, kPi);
    Propagator u(h, 0.0, kPi, {Scheme::magnus_midpoint, 4096});
    for (double t : {0.31 * kPi, 0.5 * kPi, 0.77 * kPi}) {
      CHECK(diff(recover_hamiltonian(u, t, 1e-3), h.at(t)) < 1e-5);
    }
  }
  SECTION("hbar scales the recovered matrix") {
    const double hb = 3.0;
    auto h = TimeDependentHamiltonian::constant(Matrix(hb * pauli_z()), 0.0, 2.0, hb);
    Propagator u(h, 0.0, 2.0, {Scheme::exact_constant, 4});
    CHECK(diff(recover_hamiltonian(u, 1.0, 1e-4), Matrix(hb * pauli_z())) < 1e-7);
  }
}

TEST_CASE("closed-form drive propagator stands on its own", "[schrodinger]") {
  auto h = TimeDependentHamiltonian::two_level_drive(1.1, 0.9, 1.6, 0.0, 4.0);
  SECTION("identity, composition, unitarity") {
    CHECK(diff(closed_form_propagator(h, 1.3, 1.3),
               Matrix(Matrix::Identity(2, 2))) < 1e-15);
    Matrix u31 = closed_form_propagator(h, 3.1, 0.4);
    Matrix u21 = closed_form_propagator(h, 2.0, 0.4);
    Matrix u32 = closed_form_propagator(h, 3.1, 2.0);
    CHECK(diff(u31, Matrix(u32 * u21)) < 1e-14);
    CHECK(unitarity_defect(u31) < 1e-14);
  }
  SECTION("satisfies the Schrodinger equation to stencil accuracy") {
    const double t = 1.7, s = 0.3, eps = 1e-5;
    Matrix du = (closed_form_propagator(h, t + eps, s) -
                 closed_form_propagator(h, t - eps, s)) /
                (2.0 * eps);
    Matrix residual = Complex(0, h.hbar()) * du -
                      h.at(t) * closed_form_propagator(h, t, s);
    CHECK(max_abs(residual) < 1e-8);
  }
  SECTION("resonant transition probability is the textbook sine") {
    auto res = TimeDependentHamiltonian::two_level_drive(2.0, 1.0, 2.0, 0.0, kPi);
    Vector psi0(2);
    psi0 << 1, 0;
    for (double t : {0.2, 0.9, 2.2, kPi}) {
      Vector psi = closed_form_propagator(res, t, 0.0) * psi0;
      CHECK(std::abs(std::norm(psi[1]) - std::pow(std::sin(0.5 * t), 2)) < 1e-14);
    }
  }
  SECTION("no closed form for tabulated generators") {
    auto tab = TimeDependentHamiltonian::tabulated({0.0, 1.0},
                                                   {pauli_z(), pauli_x()});
    CHECK_THROWS_AS(closed_form_propagator(tab, 0.5, 0.0), MethodMismatchError);
  }
}

TEST_CASE("magnus matches the rabi oracle on the resonant scenario",
          "[schrodinger]") {
  auto res = TimeDependentHamiltonian::two_level_drive(2.0, 1.0, 2.0, 0.0, kPi);
  Propagator u(res, 0.0, kPi, {Scheme::magnus_midpoint, 1024});
  Vector psi0(2);
  psi0 << 1, 0;
  double worst = 0;
  for (double t : u.grid()) {
    Vector psi = u.at(t) * psi0;
    worst = std::max(worst,
                     std::abs(std::norm(psi[1]) - std::pow(std::sin(0.5 * t), 2)));
  }
  CHECK(worst < 5e-6);  // measured 1.4e-6 at this step count
}

TEST_CASE("corrupted generators are rejected at propagator build",
          "[schrodinger]") {
  auto h = TimeDependentHamiltonian::constant(pauli_z(), 0.0, 1.0);
  h.set_corruption(1e-4);
  CHECK_THROWS_AS(Propagator(h, 0.0, 1.0, {Scheme::magnus_midpoint, 8}),
                  HermiticityError);
}
