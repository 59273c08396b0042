#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pseudodyn/mode_space.hpp"
#include "pseudodyn/propagator.hpp"

namespace pseudodyn {

/// Uniformly sampled smooth drive j1(t) on [T0, T], one ModeVector per
/// sample; samples[i] is the drive at T0 + i * dt.
struct DriveSamples {
  double dt = 0.0;
  std::vector<ModeVector> samples;
};

/// j(t) = u delta(t - T) - v delta(t - T0) + j1(t) on [T0, T], per mode.
struct SourceSpec {
  double T = 0.0;
  double T0 = 0.0;
  ModeVector u_hat;
  ModeVector v_hat;
  std::optional<DriveSamples> drive;
};

SourceSpec delta_pair_source(const ModeSpace& ms, const ModeVector& u_hat,
                             const ModeVector& v_hat, double T, double T0);

/// Attaches a drive; the samples must span [T0, T] exactly.
SourceSpec add_smooth_drive(SourceSpec s, std::vector<ModeVector> samples,
                            double dt);

/// Time-Fourier transform of the delta layers at the mode stored at
/// `index`: u_k e^{sigma i E T} - v_k e^{sigma i E T0}.
Complex delta_layers_transform(const SourceSpec& s, std::size_t index,
                               double energy, const KernelConvention& conv);

/// Per-mode data of log Z[j] for a composite source:
///
///   log Z = sum_k [ uu_k u_k u_{-k} + 2 uv_k u_k v_{-k} + vv_k v_k v_{-k}
///                   + u_linear_k u_k + v_linear_k v_k ] + drive_constant
///
/// Quadratic coefficients depend only on omega_k, T - T0 and hbar; the
/// linear and constant parts come from the drive.
struct ZExponent {
  std::vector<Complex> uu;
  std::vector<Complex> uv;
  std::vector<Complex> vv;
  std::vector<Complex> u_linear;
  std::vector<Complex> v_linear;
  Complex drive_constant{};
  std::vector<std::size_t> partner;

  /// log Z with the given layer amplitudes.
  Complex log_value(const ModeVector& u_hat, const ModeVector& v_hat) const;
};

ZExponent z_exponent(const ModeSpace& ms, const SourceSpec& s,
                     const KernelConvention& conv = {});

/// log Z for the source's own layer amplitudes.
Complex log_generating_functional(const ModeSpace& ms, const SourceSpec& s,
                                  const KernelConvention& conv = {});

// Trapezoid-rule integrals of sampled drives against the Feynman kernel.
// Samples sit at t_start + i * dt.

/// Int f(t) D(t_eval - t; omega) dt.
Complex kernel_against_samples(double omega, double t_eval, double t_start,
                               double dt, std::span<const Complex> f,
                               const KernelConvention& conv = {});

/// Int Int f(t) g(t') D(t - t'; omega) dt dt'.
Complex kernel_double_integral(double omega, double dt,
                               std::span<const Complex> f,
                               std::span<const Complex> g,
                               const KernelConvention& conv = {});

}  // namespace pseudodyn
