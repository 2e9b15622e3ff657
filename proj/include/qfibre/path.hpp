#pragma once

// Parametrized curves in the base space, sampled on a strictly increasing
// grid. The grid uses the same arithmetic as the propagator grid so that a
// path and a propagator built with matching (begin, end, cells) agree on
// every sample time bit for bit.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qfibre/errors.hpp"

namespace qfibre {

class BasePath {
 public:
  static BasePath line(Eigen::VectorXd start, Eigen::VectorXd velocity,
                       double t_begin, double t_end, int grid_cells) {
    if (start.size() != velocity.size())
      throw DimensionError("path: start and velocity size mismatch");
    const int d = int(start.size());
    auto fn = [start = std::move(start), velocity = std::move(velocity)](double t) {
      return Eigen::VectorXd(start + t * velocity);
    };
    return BasePath("line", std::move(fn), d, t_begin, t_end, grid_cells);
  }

  static BasePath circle(double radius, double t_begin, double t_end,
                         int grid_cells) {
    auto fn = [radius](double t) {
      Eigen::VectorXd x(3);
      x << radius * std::cos(t), radius * std::sin(t), 0.0;
      return x;
    };
    return BasePath("circle", std::move(fn), 3, t_begin, t_end, grid_cells);
  }

  // (sin t, sin 2t, 0): passes through the origin at t = 0, pi, 2pi, ...
  static BasePath figure_eight(double t_begin, double t_end, int grid_cells) {
    auto fn = [](double t) {
      Eigen::VectorXd x(3);
      x << std::sin(t), std::sin(2.0 * t), 0.0;
      return x;
    };
    return BasePath("figure_eight", std::move(fn), 3, t_begin, t_end, grid_cells);
  }

  static BasePath custom(std::function<Eigen::VectorXd(double)> fn, int base_dim,
                         double t_begin, double t_end, int grid_cells) {
    return BasePath("custom", std::move(fn), base_dim, t_begin, t_end, grid_cells);
  }

  Eigen::VectorXd at(double t) const {
    if (t < a_ || t > b_)
      throw DomainError("path: t=" + std::to_string(t) + " outside [" +
                        std::to_string(a_) + ", " + std::to_string(b_) + "]");
    return fn_(t);
  }

  const std::vector<double>& grid() const { return grid_; }
  double t_begin() const { return a_; }
  double t_end() const { return b_; }
  int base_dim() const { return d_; }
  const std::string& family() const { return family_; }

 private:
  BasePath(std::string family, std::function<Eigen::VectorXd(double)> fn, int d,
           double a, double b, int cells)
      : family_(std::move(family)), fn_(std::move(fn)), d_(d), a_(a), b_(b) {
    if (!(b > a)) throw DomainError("path: empty parameter interval");
    if (cells < 1) throw DomainError("path: grid needs at least one cell");
    if (d < 1) throw DimensionError("path: base dim must be positive");
    grid_.resize(cells + 1);
    const double h = (b_ - a_) / cells;
    for (int k = 0; k <= cells; ++k) grid_[k] = a_ + k * h;
    grid_.back() = b_;
  }

  std::string family_;
  std::function<Eigen::VectorXd(double)> fn_;
  int d_;
  double a_, b_;
  std::vector<double> grid_;
};

inline Eigen::VectorXd eval_path(const BasePath& p, double t) { return p.at(t); }

}  // namespace qfibre
