#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qfibre/fibre.hpp"
#include "qfibre/propagator.hpp"
#include "qfibre/transport.hpp"

namespace qfibre {

// Transport induced by a propagator seen through a trivialization: the
// matrix of the s -> t leg is l(p(t))^dag U(t, s) l(p(s)). Coinciding
// endpoints map to the exact identity, matching the propagator itself.
inline TransportLaw evolution_transport(const TimeDependentHamiltonian& ham,
                                        const BasePath& path,
                                        const Trivialization& l,
                                        const PropagatorMethod& method = {}) {
  if (l.dim() != ham.dim())
    throw DimensionError("evolution_transport: trivialization dim " +
                         std::to_string(l.dim()) + " vs state dim " +
                         std::to_string(ham.dim()));
  auto u = std::make_shared<Propagator>(ham, path.t_begin(), path.t_end(),
                                        method);
  const int n = ham.dim();
  Trivialization gauge = l;
  return {[u, gauge, n](const BasePath& p, double s, double t) {
            if (s == t) return Matrix(Matrix::Identity(n, n));
            const Matrix ls = gauge.at(p.at(s));
            const Matrix lt = gauge.at(p.at(t));
            return Matrix(lt.adjoint() * (*u)(t, s) * ls);
          },
          n, "evolution:" + to_string(method.scheme)};
}

// Largest deviation of l(p(t)) L_{s->t} l(p(s))^dag from U(t, s) over
// seeded grid-aligned pairs. Small whenever the law genuinely is the
// propagator written in the moving frame.
inline double round_trip_defect(const TransportLaw& law, const Propagator& u,
                                const BasePath& path, const Trivialization& l,
                                int samples = 50, unsigned seed = 5) {
  const auto& grid = path.grid();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    const double s = grid[pick(rng)];
    const double t = grid[pick(rng)];
    const Matrix ls = l.at(path.at(s));
    const Matrix lt = l.at(path.at(t));
    const Matrix rebuilt = lt * law.eval(path, s, t) * ls.adjoint();
    worst = std::max(worst, max_abs(Matrix(rebuilt - u(t, s))));
  }
  return worst;
}

// A state carried along a path, one fibre vector per grid time.
struct PathLifting {
  std::vector<double> times;
  std::vector<FibreVector> values;

  const FibreVector& value_at(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t)
      throw DomainError("value_at: time " + std::to_string(t) +
                        " is not a grid time");
    return values[static_cast<std::size_t>(it - times.begin())];
  }
};

// Route through the ambient space: evolve with U(t, t0), then pull each
// snapshot into the fibre over p(t).
inline PathLifting lift_state(const TimeDependentHamiltonian& ham,
                              const BasePath& path, const Trivialization& l,
                              const Vector& psi0,
                              const PropagatorMethod& method = {}) {
  if (psi0.size() != ham.dim())
    throw DimensionError("lift_state: state size " +
                         std::to_string(psi0.size()) + " vs dim " +
                         std::to_string(ham.dim()));
  if (l.dim() != ham.dim())
    throw DimensionError("lift_state: trivialization dim mismatch");
  Propagator u(ham, path.t_begin(), path.t_end(), method);
  PathLifting out;
  out.times = path.grid();
  out.values.reserve(out.times.size());
  for (const double t : out.times) {
    const Vector psi = u.at(t) * psi0;
    out.values.push_back(to_fibre(l, path.at(t), psi));
  }
  return out;
}

// Route inside the bundle: trivialize once at the start, then push the
// initial fibre vector forward with the induced transport.
inline PathLifting lift_state_by_transport(const TimeDependentHamiltonian& ham,
                                           const BasePath& path,
                                           const Trivialization& l,
                                           const Vector& psi0,
                                           const PropagatorMethod& method = {}) {
  if (psi0.size() != ham.dim())
    throw DimensionError("lift_state_by_transport: state size " +
                         std::to_string(psi0.size()) + " vs dim " +
                         std::to_string(ham.dim()));
  const TransportLaw law = evolution_transport(ham, path, l, method);
  const double t0 = path.t_begin();
  const FibreVector start = to_fibre(l, path.at(t0), psi0);
  PathLifting out;
  out.times = path.grid();
  out.values.reserve(out.times.size());
  for (const double t : out.times) {
    FibreMap leg{start.base_point, path.at(t), law.eval(path, t0, t)};
    out.values.push_back(apply(leg, start));
  }
  return out;
}

// Largest component deviation between two liftings on the same grid.
inline double lifting_defect(const PathLifting& a, const PathLifting& b) {
  if (a.times.size() != b.times.size())
    throw DomainError("lifting_defect: grids differ in size");
  double worst = 0;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (a.times[k] != b.times[k])
      throw DomainError("lifting_defect: grids disagree at index " +
                        std::to_string(k));
    if (!same_point(a.values[k].base_point, b.values[k].base_point))
      throw BasePointError("lifting_defect: base points disagree at index " +
                           std::to_string(k));
    worst = std::max(
        worst, max_abs(Vector(a.values[k].components - b.values[k].components)));
  }
  return worst;
}

// One sample of the section a lifting defines over the base space.
struct SectionSample {
  double time = 0;
  FibreVector value;
};

// All grid snapshots whose base point lies within radius of x. A path
// that revisits x yields several samples; a point off the path yields
// none.
inline std::vector<SectionSample> section_values_at(const PathLifting& lifting,
                                                    const Eigen::VectorXd& x,
                                                    double radius) {
  std::vector<SectionSample> hits;
  for (std::size_t k = 0; k < lifting.times.size(); ++k) {
    if ((lifting.values[k].base_point - x).norm() <= radius)
      hits.push_back({lifting.times[k], lifting.values[k]});
  }
  return hits;
}

// Property audit of the induced transport. The four structural axioms
// are followed by two conjugation records: "conjugation" rebuilds the
// fibre adjoint from the propagator adjoint, and "adjoint_reversal"
// compares the fibre adjoint of the s -> t leg with the t -> s leg,
// which singles out non-unitary evolution.
inline AxiomReport transport_property_report(
    const TimeDependentHamiltonian& ham, const BasePath& path,
    const Trivialization& l, const PropagatorMethod& method = {},
    int samples = 50, unsigned seed = 6, const Tolerances& tol = {}) {
  const TransportLaw law = evolution_transport(ham, path, l, method);
  const Propagator u(ham, path.t_begin(), path.t_end(), method);
  AxiomReport report = check_axioms(law, path, samples, seed, tol);

  const auto& grid = path.grid();
  std::mt19937_64 rng(seed + 1);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  double conj = 0;
  double reversal = 0;
  for (int k = 0; k < samples; ++k) {
    const double s = grid[pick(rng)];
    const double t = grid[pick(rng)];
    const FibreMap leg{path.at(s), path.at(t), law.eval(path, s, t)};
    const FibreMap adj = fibre_map_dagger(leg, l);
    const Matrix ls = l.at(path.at(s));
    const Matrix lt = l.at(path.at(t));
    const Matrix oracle = ls.adjoint() * dagger(u(t, s)) * lt;
    conj = std::max(conj, max_abs(Matrix(adj.matrix - oracle)));
    reversal =
        std::max(reversal, max_abs(Matrix(adj.matrix - law.eval(path, t, s))));
  }
  report.records.push_back(
      {law.id, "conjugation", conj, tol.equality, conj <= tol.equality});
  report.records.push_back({law.id, "adjoint_reversal", reversal,
                            tol.unitarity, reversal <= tol.unitarity});
  return report;
}

// Mean value of an ambient observable read entirely inside the fibre:
// the operator is moved to the base point first, so the answer cannot
// depend on which trivialization carried the state there.
inline Complex bundle_expectation(const Matrix& observable,
                                  const FibreVector& v,
                                  const Trivialization& l) {
  const FibreMap op = operator_at_point(l, observable, v.base_point);
  const Complex norm2 = fibre_inner(v, v);
  if (norm2.real() <= 0.0)
    throw ZeroNormError("bundle_expectation: zero fibre vector");
  return fibre_inner(v, apply(op, v)) / norm2;
}

}  // namespace qfibre
