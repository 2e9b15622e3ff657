#pragma once

// Pointwise unitary maps l_x from the fibre over x to the typical fibre.
// Every fibre is stored in its own orthonormal frame, so l_x is just an
// n x n unitary matrix that depends on the base point. Unitarity is
// validated on every query; it is the one structural assumption the rest
// of the bundle machinery leans on.

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <utility>

#include "qfibre/linalg.hpp"

namespace qfibre {

enum class RotationAxis { x, y, z };

inline RotationAxis axis_from_string(const std::string& s) {
  if (s == "x") return RotationAxis::x;
  if (s == "y") return RotationAxis::y;
  if (s == "z") return RotationAxis::z;
  throw DomainError("unknown rotation axis '" + s + "'");
}

class Trivialization {
 public:
  static Trivialization identity(int dim) {
    return Trivialization("identity", dim,
                          [dim](const Eigen::VectorXd&) {
                            return Matrix(Matrix::Identity(dim, dim));
                          });
  }

  // l_x = exp(-i * (k . x) * S_axis) with S_axis the spin-(n-1)/2
  // generator. For dim 2 and axis z this is diag(e^{-i th/2}, e^{+i th/2}).
  static Trivialization rotation_field(int dim, RotationAxis axis,
                                       Eigen::VectorXd wavevector) {
    Matrix gen;
    switch (axis) {
      case RotationAxis::x: gen = spin_x(dim); break;
      case RotationAxis::y: gen = spin_y(dim); break;
      case RotationAxis::z: gen = spin_z(dim); break;
    }
    auto fn = [gen = std::move(gen), k = std::move(wavevector)](
                  const Eigen::VectorXd& x) {
      if (x.size() != k.size())
        throw DimensionError("rotation_field: wavevector has " +
                             std::to_string(k.size()) + " components, point has " +
                             std::to_string(x.size()));
      return expm_hermitian_generator(gen, k.dot(x));
    };
    return Trivialization("rotation_field", dim, std::move(fn));
  }

  // A deterministic "noise" gauge: the unitary at x is seeded from the
  // raw bit patterns of the coordinates, so repeated queries at the same
  // point reproduce the same matrix exactly.
  static Trivialization seeded_random_unitary(int dim, std::uint64_t seed) {
    auto fn = [dim, seed](const Eigen::VectorXd& x) {
      std::uint64_t h = fnv1a(&seed, sizeof seed);
      h = fnv1a(x.data(), std::size_t(x.size()) * sizeof(double), h);
      return random_unitary(dim, h);
    };
    return Trivialization("seeded_random_unitary", dim, std::move(fn));
  }

  static Trivialization custom(std::string name,
                               std::function<Matrix(const Eigen::VectorXd&)> fn,
                               int dim) {
    return Trivialization(std::move(name), dim, std::move(fn));
  }

  Matrix at(const Eigen::VectorXd& x) const {
    Matrix l = fn_(x);
    if (l.rows() != dim_ || l.cols() != dim_)
      throw DimensionError("trivialization '" + name_ + "': evaluator returned " +
                           std::to_string(l.rows()) + "x" + std::to_string(l.cols()));
    const double defect = unitarity_defect(l);
    if (defect > unitarity_tol_)
      throw UnitarityError("trivialization '" + name_ + "': defect " +
                           detail::num(defect) + " at a queried point");
    return l;
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

 private:
  Trivialization(std::string name, int dim,
                 std::function<Matrix(const Eigen::VectorXd&)> fn)
      : name_(std::move(name)), dim_(dim), fn_(std::move(fn)) {
    if (dim < 1) throw DimensionError("trivialization: dim must be positive");
  }

  std::string name_;
  int dim_;
  std::function<Matrix(const Eigen::VectorXd&)> fn_;
  double unitarity_tol_ = 1e-10;
};

inline Matrix trivialization_at(const Trivialization& l,
                                const Eigen::VectorXd& x) {
  return l.at(x);
}

}  // namespace qfibre
