#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pseudodyn/gaussian.hpp"
#include "pseudodyn/pseudodynamics.hpp"

namespace pseudodyn {

enum class Verdict { kPass, kFail, kInconclusive };

const char* to_string(Verdict v);

/// One scalar outcome of a check. Judged metrics pass when value <= tolerance;
/// reported ones carry no verdict.
struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<double> tolerance;

  bool judged() const { return tolerance.has_value(); }
  bool pass() const { return !judged() || value <= *tolerance; }
};

struct ResidualReport {
  std::string identity;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<Metric> metrics;
  /// Quantity reported but never judged: g(T) for the second-order identity,
  /// the up-to-constant factor for relation checks.
  std::optional<std::pair<std::string, Complex>> reported_constant;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::kInconclusive;

  /// Sets the verdict from the judged metrics.
  void finalize();
  const Metric& metric(const std::string& name) const;
  bool passed() const { return verdict == Verdict::kPass; }
};

struct Tolerances {
  double coefficient = 1e-12;
  double second_order = 1e-10;
  double numeric = 1e-6;
  double spread = 1e-9;
};

struct NumericCheckOptions {
  int u_samples = 16;
  double dT = 1e-4;
  std::uint64_t seed = 20261016;
  /// 5 (fourth order, default) or 3 (plain central difference).
  int stencil = 5;
  /// Multiplies every random u sample.
  double u_scale = 1.0;
};

/// Residual polynomial of i dPhi/dT - sum_k u_k (c1 omega_k d_k - c2 u_{-k}) Phi,
/// divided by Phi.
QuadraticPolynomial first_order_residual(const EvolutionState& st, Complex c1,
                                         Complex c2);

/// Residual polynomial of (i h d/dT - H) Phi / Phi with H in the given
/// mode-space convention.
QuadraticPolynomial second_order_residual(const EvolutionState& st,
                                          const Eq13Convention& conv);

/// Curvature pairing of H in convention `conv`: s eta2 h^2 omega_k^2 / 2.
CMatrix hamiltonian_curvature(const ModeSpace& ms, const Eq13Convention& conv);
/// Potential pairing of H in convention `conv`: eta2 / 2.
CMatrix hamiltonian_potential(const ModeSpace& ms, const Eq13Convention& conv);

/// Draws `count` complex vectors with real and imaginary parts uniform in
/// [-1, 1].
std::vector<CVector> random_u_samples(std::size_t dim, int count,
                                      std::uint64_t seed);

/// First-order evolution law with the state's recorded (c1, c2):
/// coefficient-level residuals plus a central-difference check in T.
ResidualReport residual_eq14(const EvolutionState& st, const Tolerances& tol = {},
                             const NumericCheckOptions& opts = {});

/// Second-order (normally ordered) identity, judged up to a u-independent
/// constant g(T), which is reported.
ResidualReport residual_eq13(const EvolutionState& st, const Tolerances& tol = {},
                             const NumericCheckOptions& opts = {});

/// Normal-ordering constant sum_{kk'} c_{kk'} 2 A_{kk'} of the state's
/// Hamiltonian, summed mode by mode; compared bit-for-bit with the
/// constant the coefficient algebra produces for b = 0.
Complex normal_ordering_trace(const EvolutionState& st,
                              const Eq13Convention& conv);

/// Max over samples of the normwise relative error between gradient_at and
/// central differences of evaluate with the given step.
double gradient_check(const GaussianCoefficients& g, int u_samples, double step,
                      std::uint64_t seed = 7);

/// Advances through `partitions` and compares with a direct build at their
/// sum; returns the largest coefficient deviation.
double semigroup_check(const ModeSpace& ms, const ModeVector& v_hat,
                       std::span<const double> partitions,
                       const KernelConvention& conv,
                       const ConventionCalibration& calib);

}  // namespace pseudodyn
