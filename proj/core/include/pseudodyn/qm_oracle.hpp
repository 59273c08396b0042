#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pseudodyn/gaussian.hpp"
#include "pseudodyn/propagator.hpp"
#include "pseudodyn/verifier.hpp"

namespace pseudodyn {

/// Raised when an evolved state reaches the edge of the position grid.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform position grid q_i = q_min + i (q_max - q_min) / n_points with
/// zero Dirichlet data outside, for the oscillator H = (p^2 + omega^2 q^2)/2.
struct QMGrid {
  double q_min = -12.0;
  double q_max = 12.0;
  int n_points = 1024;
  double dt = 1e-3;
  double omega = 1.0;
  double hbar = 1.0;

  void validate() const;
  double spacing() const { return (q_max - q_min) / n_points; }
  std::vector<double> positions() const;
  /// Largest |p| an endpoint transform may use: half the grid Nyquist band.
  double momentum_band() const;
};

/// Real drive j1(t) sampled at t0 + i * dt, linearly interpolated in between.
struct DriveSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  static DriveSeries zero(double t0, double t1);
  static DriveSeries sample(double t0, double t1, double dt,
                            const std::function<double(double)>& f);

  bool empty() const { return values.empty(); }
  double t1() const { return t0 + dt * static_cast<double>(values.size() - 1); }
  double at(double t) const;
  bool identically_zero() const;
};

struct GroundStateOptions {
  double tau_step = 0.0;  ///< 0 selects 10 / omega
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

/// Grid ground state by implicit imaginary-time relaxation, normalized so
/// that sum |psi|^2 dq = 1 and positive at the centre. Throws
/// std::runtime_error when the iteration does not converge.
CVector ground_state(const QMGrid& grid, const GroundStateOptions& opts = {});

/// Boundary weights standing in for the half-infinite path measures on
/// either side of [T0, T]; both default to the oscillator ground state.
struct BoundaryFactors {
  CVector left;
  CVector right;

  static BoundaryFactors vacuum(const QMGrid& grid);
};

/// Evolves every column of `states` under dpsi/dt = -(i/h) H psi + i j1(t) q psi
/// from T0 to T with Crank-Nicolson steps of at most grid.dt. An empty drive
/// means j1 = 0. Throws GridError on edge leakage above 1e-8.
CMatrix propagate_driven(const CMatrix& states, const QMGrid& grid,
                         const DriveSeries& drive, double T0, double T);
CVector propagate_driven(const CVector& state, const QMGrid& grid,
                         const DriveSeries& drive, double T0, double T);

/// Kernel sandwiched by boundary factors and Fourier transformed at both
/// endpoints; entry (i, j) is for p = p_grid[i], p0 = p0_grid[j]:
///   sum_q e^{i p q} psi_R(q) [U(T, T0) psi_L e^{-i p0 q}](q) dq.
CMatrix relation5_lhs(const QMGrid& grid, const DriveSeries& drive, double T0,
                      double T, std::span<const double> p0_grid,
                      std::span<const double> p_grid,
                      const BoundaryFactors& boundary);
CMatrix relation5_lhs(const QMGrid& grid, const DriveSeries& drive, double T0,
                      double T, std::span<const double> p0_grid,
                      std::span<const double> p_grid);

/// Source integrals of j(t) = p delta(t - T) - p0 delta(t - T0) + j1(t)
/// against the Feynman kernel that do not depend on (p, p0).
class Relation5Source {
 public:
  Relation5Source(const DriveSeries& drive, double T0, double T, double omega,
                  double hbar);

  /// Z[j] = exp(-(i / 2h) Int Int j(t) D(t - t') j(t') dt dt').
  Complex operator()(double p0, double p) const;
  Complex log_value(double p0, double p) const;

 private:
  double hbar_;
  Complex same_time_;
  Complex across_;
  Complex drive_at_T_;
  Complex drive_at_T0_;
  Complex drive_drive_;
};

Complex relation5_rhs(double p0, double p, const DriveSeries& drive, double T0,
                      double T, double omega, double hbar);

CMatrix relation5_rhs_matrix(std::span<const double> p0_grid,
                             std::span<const double> p_grid,
                             const DriveSeries& drive, double T0, double T,
                             double omega, double hbar);

/// Entrywise lhs / rhs over entries with |lhs| >= exclusion; passes when
/// std / |mean| of the ratio is within `tolerance`. The mean is reported.
ResidualReport compare_relation5(const CMatrix& lhs, const CMatrix& rhs,
                                 double tolerance, double exclusion = 1e-8);

/// Mixed second difference of log values at (p, p0):
///   log[Z(p, p0) Z(0, 0) / (Z(p, 0) Z(0, p0))] / (i p p0 / h),
/// which isolates the kernel D(T - T0) of the cross term. `values` holds the
/// four entries in the order (p, p0), (p, 0), (0, p0), (0, 0).
Complex cross_term_kernel(std::span<const Complex, 4> values, double p0,
                          double p, double hbar);

/// cross_term_kernel measured from the grid solver.
Complex measured_cross_kernel(const QMGrid& grid, double T0, double T,
                              double p0, double p);

}  // namespace pseudodyn
