#pragma once

// Time-dependent Hamiltonians H(t) on a finite interval. Parameters are
// angular frequencies, so matrix entries carry one factor of hbar; the
// generated dynamics then depend only on the frequencies themselves.

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qfibre/linalg.hpp"

namespace qfibre {

enum class HamiltonianFamily { constant, piecewise_constant, two_level_drive, tabulated, custom };

inline std::string to_string(HamiltonianFamily f) {
  switch (f) {
    case HamiltonianFamily::constant: return "constant";
    case HamiltonianFamily::piecewise_constant: return "piecewise_constant";
    case HamiltonianFamily::two_level_drive: return "two_level_drive";
    case HamiltonianFamily::tabulated: return "tabulated";
    case HamiltonianFamily::custom: return "custom";
  }
  return "?";
}

class TimeDependentHamiltonian {
 public:
  struct ConstantData {
    Matrix h;
  };
  struct PiecewiseData {
    std::vector<double> edges;  // k+1 strictly increasing edges
    std::vector<Matrix> segments;
  };
  struct DriveData {
    double delta;  // detuning
    double rabi;
    double drive;  // carrier frequency
  };
  struct TabulatedData {
    std::vector<double> times;
    std::vector<Matrix> samples;
  };
  struct CustomData {
    std::function<Matrix(double)> fn;
  };

  static TimeDependentHamiltonian constant(Matrix h, double t_begin,
                                           double t_end, double hbar = 1.0,
                                           double hermiticity_tol = 1e-10) {
    TimeDependentHamiltonian out(HamiltonianFamily::constant, int(h.rows()),
                                 t_begin, t_end, hbar, hermiticity_tol);
    if (h.rows() != h.cols()) throw DimensionError("constant: matrix not square");
    out.data_ = ConstantData{std::move(h)};
    return out;
  }

  static TimeDependentHamiltonian piecewise_constant(
      std::vector<double> edges, std::vector<Matrix> segments,
      double hbar = 1.0, double hermiticity_tol = 1e-10) {
    if (edges.size() < 2 || segments.size() != edges.size() - 1)
      throw DomainError("piecewise_constant: need k segments and k+1 edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i] > edges[i - 1]))
        throw DomainError("piecewise_constant: edges not strictly increasing");
    const int n = int(segments.front().rows());
    for (const Matrix& m : segments)
      if (m.rows() != n || m.cols() != n)
        throw DimensionError("piecewise_constant: segment size mismatch");
    TimeDependentHamiltonian out(HamiltonianFamily::piecewise_constant, n,
                                 edges.front(), edges.back(), hbar,
                                 hermiticity_tol);
    out.data_ = PiecewiseData{std::move(edges), std::move(segments)};
    return out;
  }

  // H(t) = hbar * [ (delta/2) sz + (rabi/2)(cos(drive t) sx + sin(drive t) sy) ].
  // In the frame corotating with the carrier this is constant, which gives
  // the closed-form propagator used as a reference elsewhere.
  static TimeDependentHamiltonian two_level_drive(double delta, double rabi,
                                                  double drive, double t_begin,
                                                  double t_end,
                                                  double hbar = 1.0,
                                                  double hermiticity_tol = 1e-10) {
    TimeDependentHamiltonian out(HamiltonianFamily::two_level_drive, 2,
                                 t_begin, t_end, hbar, hermiticity_tol);
    out.data_ = DriveData{delta, rabi, drive};
    return out;
  }

  // Linear interpolation between Hermitian samples on a strictly
  // increasing time grid.
  static TimeDependentHamiltonian tabulated(std::vector<double> times,
                                            std::vector<Matrix> samples,
                                            double hbar = 1.0,
                                            double hermiticity_tol = 1e-10) {
    if (times.size() < 2 || samples.size() != times.size())
      throw DomainError("tabulated: need at least two samples, one per time");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw DomainError("tabulated: times not strictly increasing");
    const int n = int(samples.front().rows());
    for (const Matrix& m : samples)
      if (m.rows() != n || m.cols() != n)
        throw DimensionError("tabulated: sample size mismatch");
    TimeDependentHamiltonian out(HamiltonianFamily::tabulated, n,
                                 times.front(), times.back(), hbar,
                                 hermiticity_tol);
    out.data_ = TabulatedData{std::move(times), std::move(samples)};
    return out;
  }

  static TimeDependentHamiltonian custom(std::function<Matrix(double)> fn,
                                         int dim, double t_begin, double t_end,
                                         double hbar = 1.0,
                                         double hermiticity_tol = 1e-10) {
    TimeDependentHamiltonian out(HamiltonianFamily::custom, dim, t_begin,
                                 t_end, hbar, hermiticity_tol);
    out.data_ = CustomData{std::move(fn)};
    return out;
  }

  // Adds i*eps to the (0,0) entry of every evaluation. Only useful for
  // negative controls; combine with a loosened hermiticity tolerance so
  // the corruption reaches the downstream checks instead of throwing here.
  TimeDependentHamiltonian& set_corruption(double eps) {
    corruption_ = eps;
    return *this;
  }

  Matrix at(double t) const {
    if (t < t_begin_ || t > t_end_)
      throw DomainError("hamiltonian: t=" + std::to_string(t) +
                        " outside [" + std::to_string(t_begin_) + ", " +
                        std::to_string(t_end_) + "]");
    Matrix h = evaluate(t);
    if (corruption_ != 0.0) h(0, 0) += Complex(0.0, corruption_);
    const double defect = hermiticity_defect(h);
    if (defect > hermiticity_tol_)
      throw HermiticityError("hamiltonian: defect " + detail::num(defect) +
                             " at t=" + detail::num(t) + " exceeds " +
                             detail::num(hermiticity_tol_));
    return h;
  }

  HamiltonianFamily family() const { return family_; }
  int dim() const { return dim_; }
  double hbar() const { return hbar_; }
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  double hermiticity_tol() const { return hermiticity_tol_; }

  const ConstantData& constant_data() const {
    if (family_ != HamiltonianFamily::constant)
      throw MethodMismatchError("not a constant Hamiltonian");
    return std::get<ConstantData>(data_);
  }
  const PiecewiseData& piecewise_data() const {
    if (family_ != HamiltonianFamily::piecewise_constant)
      throw MethodMismatchError("not a piecewise-constant Hamiltonian");
    return std::get<PiecewiseData>(data_);
  }
  const DriveData& drive_data() const {
    if (family_ != HamiltonianFamily::two_level_drive)
      throw MethodMismatchError("not a two-level drive");
    return std::get<DriveData>(data_);
  }

 private:
  TimeDependentHamiltonian(HamiltonianFamily family, int dim, double t_begin,
                           double t_end, double hbar, double hermiticity_tol)
      : family_(family),
        dim_(dim),
        t_begin_(t_begin),
        t_end_(t_end),
        hbar_(hbar),
        hermiticity_tol_(hermiticity_tol) {
    if (dim < 1) throw DimensionError("hamiltonian: dim must be positive");
    if (!(t_end > t_begin))
      throw DomainError("hamiltonian: empty time domain");
    if (!(hbar > 0.0))
      throw UnitsError("hamiltonian: hbar must be positive, got " +
                       std::to_string(hbar));
  }

  Matrix evaluate(double t) const {
    switch (family_) {
      case HamiltonianFamily::constant:
        return std::get<ConstantData>(data_).h;
      case HamiltonianFamily::piecewise_constant: {
        const auto& d = std::get<PiecewiseData>(data_);
        return d.segments[segment_index(d.edges, t)];
      }
      case HamiltonianFamily::two_level_drive: {
        const auto& d = std::get<DriveData>(data_);
        const double ph = d.drive * t;
        Matrix h = 0.5 * hbar_ *
                   (d.delta * pauli_z() +
                    d.rabi * (std::cos(ph) * pauli_x() + std::sin(ph) * pauli_y()));
        return h;
      }
      case HamiltonianFamily::tabulated: {
        const auto& d = std::get<TabulatedData>(data_);
        const std::size_t i = segment_index(d.times, t);
        const double w =
            (t - d.times[i]) / (d.times[i + 1] - d.times[i]);
        return (1.0 - w) * d.samples[i] + w * d.samples[i + 1];
      }
      case HamiltonianFamily::custom:
        return std::get<CustomData>(data_).fn(t);
    }
    throw Error("hamiltonian: unreachable");
  }

  // Index of the half-open cell [e_i, e_{i+1}) containing t; the final
  // cell is closed so the right endpoint stays in domain.
  static std::size_t segment_index(const std::vector<double>& edges, double t) {
    auto it = std::upper_bound(edges.begin(), edges.end(), t);
    std::size_t i = (it == edges.begin()) ? 0 : std::size_t(it - edges.begin()) - 1;
    if (i > edges.size() - 2) i = edges.size() - 2;
    return i;
  }

  HamiltonianFamily family_;
  int dim_;
  double t_begin_, t_end_;
  double hbar_;
  double hermiticity_tol_;
  double corruption_ = 0.0;
  std::variant<ConstantData, PiecewiseData, DriveData, TabulatedData, CustomData> data_;
};

inline Matrix eval_hamiltonian(const TimeDependentHamiltonian& h, double t) {
  return h.at(t);
}

}  // namespace qfibre
