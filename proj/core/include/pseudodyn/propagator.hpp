#pragma once

#include <span>

#include "pseudodyn/mode_space.hpp"

namespace pseudodyn {

/// Fourier convention of the single-mode energy integral
///   D(tau; omega) = (1/2pi) Int dE exp(sigma i E tau) / (E^2 - omega^2 + i eps)
/// with eps -> 0+. The closed form does not depend on sigma.
struct KernelConvention {
  int sigma = +1;

  static KernelConvention make(int sigma);
};

/// Exact eps -> 0+ limit: -(i / (2 omega)) exp(-i omega |tau|).
Complex feynman_kernel_closed(double omega, double tau,
                              const KernelConvention& conv = {});

struct QuadratureOptions {
  double epsilon = 1e-4;
  /// Integration runs over [-energy_cutoff, energy_cutoff].
  double energy_cutoff = 1e3;
  /// Node density (points per unit E) at the poles E = +-omega. Must be at
  /// least 64 and no coarser than one node per epsilon/4.
  double pole_density = 0.0;
  /// Adds the asymptotic |E| > cutoff contribution to the estimate.
  bool tail_correction = true;
};

struct QuadratureResult {
  Complex value;
  /// Size of the |E| > cutoff contribution (added to `value` when tail
  /// correction is on, otherwise the missing amount).
  double truncation_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Brute-force estimate of the eps-regularized kernel by composite
/// Gauss-Legendre quadrature on a mesh graded geometrically towards the
/// poles. Only used as an oracle against feynman_kernel_closed.
/// Throws ContractError when the pole region is under-resolved.
QuadratureResult feynman_kernel_quadrature(double omega, double tau,
                                           const QuadratureOptions& opts,
                                           const KernelConvention& conv = {});

/// Default pole density for a given eps: eight nodes per eps.
double default_pole_density(double epsilon);

/// Polynomial (Neville) extrapolation of values[i] sampled at abscissae[i]
/// to abscissa 0.
Complex richardson_to_zero(std::span<const double> abscissae,
                           std::span<const Complex> values);

}  // namespace pseudodyn
