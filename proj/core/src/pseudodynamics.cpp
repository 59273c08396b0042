#include "pseudodyn/pseudodynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "pseudodyn/sources.hpp"
#include "pseudodyn/verifier.hpp"

namespace pseudodyn {

namespace {

// Principal square root with a +0 imaginary part on the negative real axis,
// so sqrt(-2) is i sqrt(2) rather than -i sqrt(2).
Complex principal_sqrt(Complex z) {
  if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
  return std::sqrt(z);
}

double max_residual(const QuadraticPolynomial& r) {
  return std::max({r.max_abs_q2(), r.max_abs_q1(), std::abs(r.q0)});
}

ModeVector calibration_probe(const ModeSpace& ms) {
  std::vector<Complex> ones(static_cast<std::size_t>(ms.k_max() + 1),
                            Complex(1.0, 0.0));
  return ModeVector::real_from_nonnegative(ms, ones);
}

}  // namespace

std::vector<Complex> raw_pair_coefficient_times_omega(
    const ModeSpace& ms, const KernelConvention& conv) {
  const ModeVector zero = ModeVector::zeros(ms);
  const ZExponent z =
      z_exponent(ms, delta_pair_source(ms, zero, zero, 0.0, 0.0), conv);
  std::vector<Complex> out(ms.size());
  for (std::size_t k = 0; k < ms.size(); ++k) {
    out[k] = z.uu[k] * ms.frequencies()[k];
  }
  return out;
}

EvolutionState evolution_functional(const ModeSpace& ms, const ModeVector& v_hat,
                                    double T, const KernelConvention& conv,
                                    const ConventionCalibration& calib) {
  // Orientation of the boundary layers matters; backward evolution is not
  // defined here.
  if (T < 0.0) throw ContractError("evolution_functional requires T >= 0");
  if (v_hat.size() != ms.size()) {
    throw ContractError("v_hat is not sized to the mode space");
  }
  const ModeVector zero = ModeVector::zeros(ms);
  const ZExponent z = z_exponent(ms, delta_pair_source(ms, zero, v_hat, T, 0.0),
                                 conv);

  const std::size_t n = ms.size();
  CVector b(static_cast<Eigen::Index>(n));
  Complex c{};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = ms.partner(k);
    b(static_cast<Eigen::Index>(k)) = 2.0 * z.uv[k] * v_hat[p];
    c += z.vv[k] * v_hat[k] * v_hat[p];
  }
  GaussianCoefficients raw(pairing_matrix(ms, std::span<const Complex>(z.uu)),
                           std::move(b), c);
  return EvolutionState{ms, T, v_hat, rescale(raw, calib.lambda), calib, conv};
}

EvolutionState advance(const EvolutionState& st, double dT) {
  if (dT < 0.0) throw ContractError("advance requires dT >= 0");
  CVector b = st.g.b();
  const auto w = st.ms.frequencies();
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    const double phase = -w[static_cast<std::size_t>(k)] * dT;
    b(k) *= Complex(std::cos(phase), std::sin(phase));
  }
  EvolutionState out = st;
  out.T = st.T + dT;
  out.g = GaussianCoefficients(st.g.A(), std::move(b), st.g.c());
  return out;
}

ConventionCalibration calibrate(const ModeSpace& ms, const KernelConvention& conv,
                                const CalibrationOptions& opts) {
  ConventionCalibration calib;
  calib.sigma = conv.sigma;

  const auto aw = raw_pair_coefficient_times_omega(ms, conv);
  std::vector<Complex> lambda_sq(aw.size());
  for (std::size_t k = 0; k < aw.size(); ++k) {
    lambda_sq[k] = 1.0 / (2.0 * aw[k]);
  }
  double spread = 0.0;
  for (const auto& l : lambda_sq) {
    spread = std::max(spread, std::abs(l - lambda_sq[0]) / std::abs(lambda_sq[0]));
  }
  if (spread > opts.lambda_spread_tol) {
    // a_omega * omega is constant for the free-field kernel.
    throw std::logic_error("calibration: lambda^2 depends on the mode");
  }
  calib.lambda = opts.forced_lambda ? *opts.forced_lambda
                                    : principal_sqrt(lambda_sq[0]);

  const EvolutionState st =
      evolution_functional(ms, calibration_probe(ms), 1.0, conv, calib);

  const QuadraticPolynomial canonical = first_order_residual(st, 1.0, 1.0);
  if (max_residual(canonical) <= opts.first_order_tol) {
    calib.c1 = 1.0;
    calib.c2 = 1.0;
    calib.first_order_residual = max_residual(canonical);
  } else {
    // Fit (c1, c2): the left side is linear in u only, so c1 balances the
    // linear terms and c2 the pair terms.
    const QuadraticPolynomial lhs = first_order_residual(st, 0.0, 0.0);
    CVector w(static_cast<Eigen::Index>(ms.size()));
    for (std::size_t k = 0; k < ms.size(); ++k) {
      w(static_cast<Eigen::Index>(k)) = ms.frequencies()[k];
    }
    const QuadraticPolynomial derivative = apply_first_order(
        st.g, w, CMatrix::Zero(w.size(), w.size()));
    Complex c1{};
    Complex c2{};
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const auto p = static_cast<Eigen::Index>(ms.partner(k));
      c1 += lhs.q1(i) / derivative.q1(i);
      c2 += derivative.q2(i, p);
    }
    c1 /= static_cast<double>(ms.size());
    c2 = c1 * c2 / static_cast<double>(ms.size());
    calib.c1 = c1;
    calib.c2 = c2;
    calib.first_order_residual = max_residual(first_order_residual(st, c1, c2));
  }

  // Second-order identity: try curvature signs and the source phase, the
  // conventions the field equation alone leaves open.
  constexpr std::array<std::pair<int, int>, 4> kCandidates{
      {{-1, +1}, {+1, +1}, {-1, -1}, {+1, -1}}};
  calib.second_order = Eq13Convention{};
  for (const auto& [sign, phase_sq] : kCandidates) {
    const Eq13Convention candidate{sign, phase_sq, true};
    const QuadraticPolynomial r = second_order_residual(st, candidate);
    if (std::max(r.max_abs_q2(), r.max_abs_q1()) <= opts.second_order_tol) {
      calib.second_order = candidate;
      break;
    }
  }
  return calib;
}

}  // namespace pseudodyn
