#pragma once

// Evolution operators U(t,s) built from a Hamiltonian by time stepping.
// Step factors over the grid are cached once; a grid-aligned query is then
// an ordered partial product of those factors, so composing U over
// subintervals agrees with the direct query to roundoff. Off-grid times
// are handled with a single fractional step of the same scheme, which
// costs one extra scheme-level error term at the straddled cell.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qfibre/hamiltonian.hpp"
#include "qfibre/linalg.hpp"

namespace qfibre {

enum class Scheme { exact_constant, magnus_midpoint, crank_nicolson, euler_unstable };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::exact_constant: return "exact_constant";
    case Scheme::magnus_midpoint: return "magnus_midpoint";
    case Scheme::crank_nicolson: return "crank_nicolson";
    case Scheme::euler_unstable: return "euler_unstable";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "exact_constant") return Scheme::exact_constant;
  if (s == "magnus_midpoint") return Scheme::magnus_midpoint;
  if (s == "crank_nicolson") return Scheme::crank_nicolson;
  if (s == "euler_unstable") return Scheme::euler_unstable;
  throw MethodMismatchError("unknown scheme '" + s + "'");
}

struct PropagatorMethod {
  Scheme scheme = Scheme::magnus_midpoint;
  int steps = 256;
};

class Propagator {
 public:
  Propagator(TimeDependentHamiltonian ham, double t0, double t1,
             PropagatorMethod method)
      : ham_(std::move(ham)), scheme_(method.scheme), a_(t0), b_(t1) {
    if (!(t1 > t0)) throw DomainError("propagator: need t1 > t0");
    if (t0 < ham_.t_begin() || t1 > ham_.t_end())
      throw DomainError("propagator: [t0,t1] not inside Hamiltonian domain");
    if (method.steps < 1)
      throw DomainError("propagator: steps must be >= 1");
    if (scheme_ == Scheme::exact_constant &&
        ham_.family() != HamiltonianFamily::constant &&
        ham_.family() != HamiltonianFamily::piecewise_constant)
      throw MethodMismatchError(
          "exact_constant propagator needs a constant or piecewise-constant "
          "Hamiltonian, got " + to_string(ham_.family()));

    const int n = method.steps;
    grid_.resize(n + 1);
    const double h = (b_ - a_) / n;
    for (int k = 0; k <= n; ++k) grid_[k] = a_ + k * h;
    grid_.back() = b_;

    if (scheme_ != Scheme::exact_constant) {
      factors_.reserve(n);
      prefix_.reserve(n + 1);
      prefix_.push_back(Matrix::Identity(dim(), dim()));
      for (int k = 0; k < n; ++k) {
        factors_.push_back(step_factor(grid_[k], grid_[k + 1]));
        prefix_.push_back(factors_.back() * prefix_.back());
      }
    }
  }

  int dim() const { return ham_.dim(); }
  double hbar() const { return ham_.hbar(); }
  double t_begin() const { return a_; }
  double t_end() const { return b_; }
  Scheme scheme() const { return scheme_; }
  const std::vector<double>& grid() const { return grid_; }
  const TimeDependentHamiltonian& hamiltonian() const { return ham_; }

  // U(t,s): maps the state at time s to the state at time t.
  Matrix operator()(double t, double s) const {
    check_domain(s);
    check_domain(t);
    if (s == t) return Matrix::Identity(dim(), dim());
    if (scheme_ == Scheme::exact_constant) return exact(t, s);
    if (s < t) return forward(s, t);
    return forward(t, s).partialPivLu().inverse();
  }

  // U(t, t0) with t0 the start of the build interval.
  Matrix at(double t) const {
    check_domain(t);
    if (scheme_ == Scheme::exact_constant) return exact(t, a_);
    auto exact_hit = std::lower_bound(grid_.begin(), grid_.end(), t);
    if (exact_hit != grid_.end() && *exact_hit == t)
      return prefix_[std::size_t(exact_hit - grid_.begin())];
    return (*this)(t, a_);
  }

 private:
  void check_domain(double t) const {
    if (t < a_ || t > b_)
      throw DomainError("propagator: t=" + std::to_string(t) +
                        " outside [" + std::to_string(a_) + ", " +
                        std::to_string(b_) + "]");
  }

  std::size_t cell_index(double u) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
    std::size_t i = (it == grid_.begin()) ? 0 : std::size_t(it - grid_.begin()) - 1;
    const std::size_t last = grid_.size() - 2;
    return std::min(i, last);
  }

  Matrix step_factor(double u, double v) const {
    const double dt = v - u;
    switch (scheme_) {
      case Scheme::magnus_midpoint:
        return expm_hermitian_generator(ham_.at(0.5 * (u + v)), dt, hbar(),
                                        ham_.hermiticity_tol());
      case Scheme::crank_nicolson: {
        const Matrix hm = ham_.at(0.5 * (u + v));
        const Complex half(0.0, 0.5 * dt / hbar());
        const Matrix eye = Matrix::Identity(dim(), dim());
        const Matrix lhs = eye + half * hm;
        const Matrix rhs = eye - half * hm;
        return lhs.partialPivLu().solve(rhs);
      }
      case Scheme::euler_unstable:
        return Matrix::Identity(dim(), dim()) -
               Complex(0.0, dt / hbar()) * ham_.at(u);
      case Scheme::exact_constant:
        break;
    }
    throw MethodMismatchError("step_factor: no stepping rule for exact_constant");
  }

  // Ordered product of cached factors plus at most two fractional steps,
  // for a <= s < t <= b.
  Matrix forward(double s, double t) const {
    const std::size_t i = cell_index(s);
    const std::size_t j = cell_index(t);
    if (i == j) {
      if (s == grid_[i] && t == grid_[i + 1]) return factors_[i];
      return step_factor(s, t);
    }
    Matrix m = (s == grid_[i]) ? factors_[i] : step_factor(s, grid_[i + 1]);
    for (std::size_t p = i + 1; p < j; ++p) m = factors_[p] * m;
    if (t > grid_[j])
      m = ((t == grid_[j + 1]) ? factors_[j] : step_factor(grid_[j], t)) * m;
    return m;
  }

  Matrix exact(double t, double s) const {
    if (ham_.family() == HamiltonianFamily::constant)
      return expm_hermitian_generator(ham_.at(a_), t - s, hbar(),
                                      ham_.hermiticity_tol());
    const auto& d = ham_.piecewise_data();
    if (s < t) return piecewise_forward(d, s, t);
    return piecewise_forward(d, t, s).partialPivLu().inverse();
  }

  Matrix piecewise_forward(const TimeDependentHamiltonian::PiecewiseData& d,
                           double s, double t) const {
    auto seg_of = [&](double u) {
      auto it = std::upper_bound(d.edges.begin(), d.edges.end(), u);
      std::size_t i = (it == d.edges.begin()) ? 0 : std::size_t(it - d.edges.begin()) - 1;
      return std::min(i, d.edges.size() - 2);
    };
    // Sample through at() at the midpoint of the covered stretch so
    // domain checks, corruption, and hermiticity validation all apply.
    auto seg_exp = [&](double u, double v) {
      return expm_hermitian_generator(ham_.at(0.5 * (u + v)), v - u, hbar(),
                                      ham_.hermiticity_tol());
    };
    const std::size_t i = seg_of(s);
    const std::size_t j = seg_of(t);
    if (i == j) return seg_exp(s, t);
    Matrix m = seg_exp(s, d.edges[i + 1]);
    for (std::size_t p = i + 1; p < j; ++p)
      m = seg_exp(d.edges[p], d.edges[p + 1]) * m;
    if (t > d.edges[j]) m = seg_exp(d.edges[j], t) * m;
    return m;
  }

  TimeDependentHamiltonian ham_;
  Scheme scheme_;
  double a_, b_;
  std::vector<double> grid_;
  std::vector<Matrix> factors_;
  std::vector<Matrix> prefix_;
};

inline Propagator build_propagator(const TimeDependentHamiltonian& h, double t0,
                                   double t1, PropagatorMethod method) {
  return Propagator(h, t0, t1, method);
}

inline Vector evolve_state(const Propagator& u, const Vector& psi0, double s,
                           double t) {
  if (psi0.size() != u.dim())
    throw DimensionError("evolve_state: state size " +
                         std::to_string(psi0.size()) + " vs dim " +
                         std::to_string(u.dim()));
  return u(t, s) * psi0;
}

// || U(t3,t1) - U(t3,t2) U(t2,t1) ||, the two-interval composition defect.
inline double composition_defect(const Propagator& u, double t1, double t2,
                                 double t3) {
  return max_abs(Matrix(u(t3, t1) - u(t3, t2) * u(t2, t1)));
}

struct InverseIdentityDefect {
  double inverse_defect;  // || U(s,t) U(t,s) - 1 ||
  double adjoint_defect;  // || dagger(U(t,s)) - U(s,t) ||
};

inline InverseIdentityDefect inverse_identity_defect(const Propagator& u,
                                                     double s, double t) {
  const Matrix fwd = u(t, s);
  const Matrix bwd = u(s, t);
  const Matrix eye = Matrix::Identity(u.dim(), u.dim());
  return {max_abs(Matrix(bwd * fwd - eye)), max_abs(Matrix(fwd.adjoint() - bwd))};
}

// Central-difference reconstruction of H(t) from the propagator:
// i hbar [U(t+d,t0) - U(t-d,t0)] / (2d) * U(t0,t).
inline Matrix recover_hamiltonian(const Propagator& u, double t, double delta) {
  if (!(delta > 0.0)) throw DomainError("recover_hamiltonian: delta must be > 0");
  if (t - delta < u.t_begin() || t + delta > u.t_end())
    throw DomainError("recover_hamiltonian: stencil leaves the domain");
  const double t0 = u.t_begin();
  const Matrix diff = u(t + delta, t0) - u(t - delta, t0);
  return Complex(0.0, u.hbar() / (2.0 * delta)) * diff * u(t0, t);
}

// Exact propagator for families that admit one in closed form; the
// reference side of convergence studies. Throws for families that don't.
inline Matrix closed_form_propagator(const TimeDependentHamiltonian& h,
                                     double t, double s) {
  switch (h.family()) {
    case HamiltonianFamily::constant:
      return expm_hermitian_generator(h.constant_data().h, t - s, h.hbar(),
                                      h.hermiticity_tol());
    case HamiltonianFamily::piecewise_constant: {
      Propagator exact(h, h.t_begin(), h.t_end(),
                       {Scheme::exact_constant, 1});
      return exact(t, s);
    }
    case HamiltonianFamily::two_level_drive: {
      // Corotating frame: phi(t) = exp(i w t sz/2) psi(t) evolves under the
      // constant generator ((delta - w)/2) sz + (rabi/2) sx.
      const auto& d = h.drive_data();
      const Matrix heff =
          0.5 * ((d.delta - d.drive) * pauli_z() + d.rabi * pauli_x());
      const Matrix rot_t = expm_hermitian_generator(pauli_z(), -0.5 * d.drive * t);
      const Matrix rot_s = expm_hermitian_generator(pauli_z(), -0.5 * d.drive * s);
      return rot_t.adjoint() * expm_hermitian_generator(heff, t - s) * rot_s;
    }
    default:
      throw MethodMismatchError("closed_form_propagator: family " +
                                to_string(h.family()) + " has no closed form");
  }
}

}  // namespace qfibre
