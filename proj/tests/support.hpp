#pragma once

// Shared helpers for the test binaries: seeded generators and matrix
// comparison against the max-entry norm.

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "qfibre/linalg.hpp"

namespace qtest {

using qfibre::Complex;
using qfibre::Matrix;
using qfibre::Vector;

inline double diff(const Matrix& a, const Matrix& b) {
  return qfibre::max_abs(Matrix(a - b));
}
inline double diff(const Vector& a, const Vector& b) {
  return qfibre::max_abs(Vector(a - b));
}

inline Vector normalized_random_state(int n, std::mt19937_64& rng) {
  Vector v = qfibre::random_state(n, rng);
  return v / v.norm();
}

}  // namespace qtest
