#pragma once

// Linear transports along a path: families L_{s->t} mapping the fibre over
// gamma(s) to the fibre over gamma(t). The axioms checked here are
// composition, identity at s = t, linearity of the action, and inversion;
// a transport satisfying them factors through a frame family F as
// L_{s->t} = F(t)^{-1} F(s), unique up to a constant invertible gauge.

#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qfibre/fibre.hpp"
#include "qfibre/path.hpp"

namespace qfibre {

struct TransportLaw {
  // eval(path, s, t) is the matrix of L_{s->t}.
  std::function<Matrix(const BasePath&, double, double)> eval;
  int dim = 0;
  std::string id = "transport";
};

struct FrameFamily {
  // eval(path, s) maps the fibre over gamma(s) to the common frame space.
  std::function<Matrix(const BasePath&, double)> eval;
  int dim = 0;
  std::string id = "frames";
};

struct CheckRecord {
  std::string law;
  std::string check;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct AxiomReport {
  std::vector<CheckRecord> records;
  bool all_pass() const {
    for (const auto& r : records)
      if (!r.pass) return false;
    return true;
  }
};

// Flat record serialization shared by the report-producing checks.
inline void write_records_csv(std::ostream& os,
                              const std::vector<CheckRecord>& records) {
  os << "law,check,max_defect,tolerance,verdict\n";
  char buf[64];
  for (const auto& r : records) {
    os << r.law << ',' << r.check << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.max_defect);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.tolerance);
    os << buf << ',' << (r.pass ? "pass" : "fail") << '\n';
  }
}

inline TransportLaw transport_from_frames(const FrameFamily& f) {
  auto eval = [f](const BasePath& path, double s, double t) {
    const Matrix ft = f.eval(path, t);
    Eigen::PartialPivLU<Matrix> lu(ft);
    if (lu.rcond() < 1e-14)
      throw SingularFrameError("transport_from_frames: frame at t=" +
                               std::to_string(t) + " is numerically singular");
    return Matrix(lu.solve(f.eval(path, s)));
  };
  return {std::move(eval), f.dim, f.id + ":transport"};
}

// F(s) := L_{s->s0}; composing through s0 recovers the law itself.
inline FrameFamily frames_from_transport(const TransportLaw& law, double s0) {
  auto eval = [law, s0](const BasePath& path, double s) {
    return law.eval(path, s, s0);
  };
  return {std::move(eval), law.dim, law.id + ":frames"};
}

inline FrameFamily gauge_transform(const FrameFamily& f, const Matrix& d) {
  if (d.rows() != f.dim || d.cols() != f.dim)
    throw DimensionError("gauge_transform: gauge matrix has wrong size");
  Eigen::PartialPivLU<Matrix> lu(d);
  if (lu.rcond() < 1e-14)
    throw SingularFrameError("gauge_transform: gauge matrix is singular");
  auto eval = [f, d](const BasePath& path, double s) {
    return Matrix(d * f.eval(path, s));
  };
  return {std::move(eval), f.dim, f.id + ":gauged"};
}

// Samples grid-aligned parameter triples; off-grid queries of numerically
// built transports carry an extra interpolation error that would swamp
// the axiom defects being measured.
inline AxiomReport check_axioms(const TransportLaw& law, const BasePath& path,
                                int samples = 200, std::uint64_t seed = 1,
                                const Tolerances& tol = {}) {
  std::mt19937_64 rng(seed);
  const auto& grid = path.grid();
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);

  double d_identity = 0, d_composition = 0, d_linearity = 0, d_inversion = 0;
  const Matrix eye = Matrix::Identity(law.dim, law.dim);
  for (int k = 0; k < samples; ++k) {
    const double r = grid[pick(rng)];
    const double s = grid[pick(rng)];
    const double t = grid[pick(rng)];

    d_identity = std::max(d_identity,
                          max_abs(Matrix(law.eval(path, s, s) - eye)));

    const Matrix l_st = law.eval(path, s, t);
    const Matrix l_rs = law.eval(path, r, s);
    d_composition = std::max(
        d_composition, max_abs(Matrix(l_st * l_rs - law.eval(path, r, t))));

    Vector u = random_state(law.dim, rng);
    Vector v = random_state(law.dim, rng);
    const Complex lam(coef(rng), coef(rng));
    const Complex mu(coef(rng), coef(rng));
    d_linearity = std::max(
        d_linearity,
        max_abs(Vector(l_st * (lam * u + mu * v) - lam * (l_st * u) -
                       mu * (l_st * v))));

    d_inversion = std::max(
        d_inversion, max_abs(Matrix(law.eval(path, t, s) * l_st - eye)));
  }

  AxiomReport report;
  auto add = [&](const char* name, double defect) {
    report.records.push_back(
        {law.id, name, defect, tol.equality, defect <= tol.equality});
  };
  add("identity", d_identity);
  add("composition", d_composition);
  add("linearity", d_linearity);
  add("inversion", d_inversion);
  return report;
}

struct HermitianVerdict {
  bool holds = false;
  double max_defect = 0.0;
};

struct UnitaryVerdict {
  bool holds = false;
  double max_defect = 0.0;
  double isometry_defect = 0.0;
};

// A transport is self-conjugate when the dagger of the t->s leg equals the
// s->t leg. For genuine transports this is equivalent to unitarity below.
inline HermitianVerdict is_hermitian_transport(const TransportLaw& law,
                                               const BasePath& path,
                                               const Trivialization& l,
                                               int samples = 50,
                                               std::uint64_t seed = 2,
                                               double tol = 1e-10) {
  std::mt19937_64 rng(seed);
  const auto& grid = path.grid();
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) j = (j + 1 + grid.size() / 3) % grid.size();
    const double s = grid[i], t = grid[j];
    FibreMap leg_ts{path.at(t), path.at(s), law.eval(path, t, s)};
    const FibreMap conj = fibre_map_dagger(leg_ts, l);
    worst = std::max(worst,
                     max_abs(Matrix(conj.matrix - law.eval(path, s, t))));
  }
  return {worst <= tol, worst};
}

inline UnitaryVerdict is_unitary_transport(const TransportLaw& law,
                                           const BasePath& path,
                                           const Trivialization& l,
                                           int samples = 50,
                                           std::uint64_t seed = 3,
                                           double tol = 1e-10) {
  std::mt19937_64 rng(seed);
  const auto& grid = path.grid();
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  const Matrix eye = Matrix::Identity(law.dim, law.dim);
  double worst = 0, iso = 0;
  for (int k = 0; k < samples; ++k) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) j = (j + 1 + grid.size() / 3) % grid.size();
    const double s = grid[i], t = grid[j];
    FibreMap leg{path.at(s), path.at(t), law.eval(path, s, t)};
    const FibreMap conj = fibre_map_dagger(leg, l);
    worst = std::max(worst, max_abs(Matrix(conj.matrix * leg.matrix - eye)));

    const Vector u = random_state(law.dim, rng);
    const Vector v = random_state(law.dim, rng);
    iso = std::max(iso, std::abs(inner(Vector(leg.matrix * u),
                                       Vector(leg.matrix * v)) -
                                 inner(u, v)));
  }
  return {worst <= tol, worst, iso};
}

}  // namespace qfibre
