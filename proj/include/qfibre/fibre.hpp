#pragma once

// Vectors living in a fibre over a base point, maps between fibres, and
// the conjugation that the trivialization induces on such maps. With
// orthonormal fibre frames the conjugate of a map collapses to the matrix
// adjoint in exact arithmetic; computing it through the trivialization
// anyway is deliberate, because the transport-level checks downstream are
// only meaningful if this layer is built from the defining formulas.

#include <Eigen/Dense>
#include <utility>

#include "qfibre/linalg.hpp"
#include "qfibre/trivialization.hpp"

namespace qfibre {

inline bool same_point(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && a == b;
}

struct FibreVector {
  Eigen::VectorXd base_point;
  Vector components;
};

// Linear map from the fibre over `source` to the fibre over `target`.
struct FibreMap {
  Eigen::VectorXd source;
  Eigen::VectorXd target;
  Matrix matrix;
};

inline FibreVector to_fibre(const Trivialization& l, const Eigen::VectorXd& x,
                            const Vector& psi) {
  if (psi.size() != l.dim())
    throw DimensionError("to_fibre: state size " + std::to_string(psi.size()) +
                         " vs fibre dim " + std::to_string(l.dim()));
  return {x, l.at(x).adjoint() * psi};
}

inline Vector from_fibre(const Trivialization& l, const FibreVector& phi) {
  if (phi.components.size() != l.dim())
    throw DimensionError("from_fibre: component count mismatch");
  return l.at(phi.base_point) * phi.components;
}

// Fibre inner product; both vectors must sit over the same base point.
inline Complex fibre_inner(const FibreVector& a, const FibreVector& b) {
  if (!same_point(a.base_point, b.base_point))
    throw BasePointError("fibre_inner: vectors live over different points");
  return inner(a.components, b.components);
}

inline FibreVector apply(const FibreMap& m, const FibreVector& v) {
  if (!same_point(m.source, v.base_point))
    throw BasePointError("apply: vector is not in the source fibre");
  if (m.matrix.cols() != v.components.size())
    throw DimensionError("apply: size mismatch");
  return {m.target, m.matrix * v.components};
}

inline FibreMap compose(const FibreMap& outer, const FibreMap& inner_map) {
  if (!same_point(outer.source, inner_map.target))
    throw BasePointError("compose: maps do not chain");
  return {inner_map.source, outer.target, outer.matrix * inner_map.matrix};
}

// Conjugate of a fibre map with respect to the fibre metrics, computed
// through the trivialization; swaps source and target. For a map
// B: source -> target the result satisfies <B' u, v>_source = <u, B v>_target
// for all u over the target and v over the source.
inline FibreMap fibre_map_dagger(const FibreMap& b, const Trivialization& l) {
  const Matrix ls = l.at(b.source);
  const Matrix lt = l.at(b.target);
  Matrix m = ls.adjoint() * (lt * b.matrix * ls.adjoint()).adjoint() * lt;
  return {b.target, b.source, std::move(m)};
}

// Parallel-identification map between fibres: l_y^{-1} o l_x. Equal points
// give the identity exactly.
inline FibreMap flat_transport(const Trivialization& l,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
  if (same_point(x, y))
    return {x, y, Matrix::Identity(l.dim(), l.dim())};
  return {x, y, Matrix(l.at(y).adjoint() * l.at(x))};
}

// Conjugate of a fibre endomorphism (a morphism leg at one point).
inline FibreMap morphism_dagger(const FibreMap& a, const Trivialization& l) {
  if (!same_point(a.source, a.target))
    throw MorphismError("morphism_dagger: map does not preserve the base point");
  const Matrix lx = l.at(a.source);
  Matrix m = lx.adjoint() * (lx * a.matrix * lx.adjoint()).adjoint() * lx;
  return {a.source, a.target, std::move(m)};
}

// Restriction of a Hilbert-space operator to the fibre over x.
inline FibreMap operator_at_point(const Trivialization& l, const Matrix& op,
                                  const Eigen::VectorXd& x) {
  if (op.rows() != l.dim() || op.cols() != l.dim())
    throw DimensionError("operator_at_point: operator is " +
                         std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + ", fibre dim " +
                         std::to_string(l.dim()));
  const Matrix lx = l.at(x);
  return {x, x, Matrix(lx.adjoint() * op * lx)};
}

}  // namespace qfibre
