#pragma once

#include <optional>

#include "pseudodyn/gaussian.hpp"
#include "pseudodyn/mode_space.hpp"
#include "pseudodyn/propagator.hpp"

namespace pseudodyn {

/// Mode-space form of the normally ordered field Hamiltonian used by the
/// second-order identity check:
///   H = 1/2 sum_k [ eta2 u_k u_{-k} + s eta2 h^2 omega_k^2 d/du_k d/du_{-k} ]
/// `curvature_sign` is s; `source_phase_sq` is eta2 = +-1, the square of the
/// phase relating the position-space source u(x) to the mode variable
/// (u_mode = eta u_x).
struct Eq13Convention {
  int curvature_sign = -1;
  int source_phase_sq = +1;
  bool found = false;
};

/// Identification of the implementation's conventions with the first-order
/// evolution law
///   i dPhi/dT = sum_k u_k (c1 omega_k d/du_k - c2 u_{-k}) Phi.
struct ConventionCalibration {
  Complex lambda{1.0, 0.0};
  int sigma = +1;
  Complex c1{1.0, 0.0};
  Complex c2{1.0, 0.0};
  /// Largest coefficient residual of the first-order law with (c1, c2).
  double first_order_residual = 0.0;
  Eq13Convention second_order;

  /// (c1, c2) == (1, 1) exactly.
  bool canonical() const { return c1 == Complex(1.0) && c2 == Complex(1.0); }
};

/// Phi(T, u): Z[u delta(t - T) - v delta(t)] as Gaussian coefficients in
/// the rescaled variables u -> lambda u.
struct EvolutionState {
  ModeSpace ms;
  double T = 0.0;
  ModeVector v_hat;
  GaussianCoefficients g;
  ConventionCalibration calib;
  KernelConvention conv;
};

/// Throws ContractError for T < 0.
EvolutionState evolution_functional(const ModeSpace& ms, const ModeVector& v_hat,
                                    double T, const KernelConvention& conv,
                                    const ConventionCalibration& calib);

/// A and c fixed, b_k -> exp(-i omega_k dT) b_k. Throws for dT < 0.
EvolutionState advance(const EvolutionState& st, double dT);

struct CalibrationOptions {
  /// Skip the algebraic solve and use this rescaling.
  std::optional<Complex> forced_lambda;
  double first_order_tol = 1e-12;
  double second_order_tol = 1e-10;
  /// Allowed relative spread of lambda^2 across modes.
  double lambda_spread_tol = 1e-12;
};

/// Solves 2 lambda^2 a_omega omega = 1 for the global rescaling, where
/// a_omega is the raw u_k u_{-k} coefficient, then records the achieved
/// (c1, c2) and the passing second-order convention. Throws std::logic_error
/// when lambda^2 differs between modes.
ConventionCalibration calibrate(const ModeSpace& ms,
                                const KernelConvention& conv = {},
                                const CalibrationOptions& opts = {});

/// Raw (uncalibrated) u_k u_{-k} coefficient times omega_k, per mode.
std::vector<Complex> raw_pair_coefficient_times_omega(
    const ModeSpace& ms, const KernelConvention& conv = {});

}  // namespace pseudodyn
