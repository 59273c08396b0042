#include "pseudodyn/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace pseudodyn {

namespace {

constexpr int kPanelOrder = 20;
using PanelRule = boost::math::quadrature::gauss<double, kPanelOrder>;

// Breakpoints from `pole` towards `end` (either direction). Panels are never
// wider than half their distance to the pole once past the innermost width.
void graded_breakpoints(double pole, double end, double innermost,
                        double widest, std::vector<double>& out) {
  const double dir = end > pole ? 1.0 : -1.0;
  const double span = std::abs(end - pole);
  double d = 0.0;
  while (d < span) {
    const double w = std::min(widest, std::max(innermost, 0.5 * d));
    d = std::min(span, d + w);
    // Avoid a sliver panel at the far end.
    if (span - d < 0.25 * w) d = span;
    out.push_back(pole + dir * d);
  }
}

// (1/pi) Int_X^inf cos(E tau) / (E^2 - omega^2) dE by repeated integration
// by parts; valid for X tau >> 1.
double oscillatory_tail(double omega, double tau, double x) {
  const double w2 = omega * omega;
  const double g = x * x - w2;
  const double f0 = 1.0 / g;
  const double f1 = -2.0 * x / (g * g);
  const double f2 = (6.0 * x * x + 2.0 * w2) / (g * g * g);
  const double f3 = -24.0 * x * (x * x + w2) / (g * g * g * g);
  const double s = std::sin(x * tau);
  const double c = std::cos(x * tau);
  const double t = tau;
  const double integral = -s * f0 / t - c * f1 / (t * t) + s * f2 / (t * t * t) +
                          c * f3 / (t * t * t * t);
  return integral / std::numbers::pi;
}

// (1/pi) Int_X^inf dE / (E^2 - omega^2).
double static_tail(double omega, double x) {
  return std::log((x + omega) / (x - omega)) / (2.0 * omega * std::numbers::pi);
}

}  // namespace

KernelConvention KernelConvention::make(int sigma) {
  if (sigma != 1 && sigma != -1) {
    throw ContractError("kernel convention sigma must be +1 or -1");
  }
  return KernelConvention{sigma};
}

Complex feynman_kernel_closed(double omega, double tau,
                              const KernelConvention& conv) {
  if (!(omega > 0.0)) throw ContractError("omega must be positive");
  (void)conv;  // even in tau, so sigma drops out
  const double phase = -omega * std::abs(tau);
  return Complex(0.0, -0.5 / omega) * Complex(std::cos(phase), std::sin(phase));
}

double default_pole_density(double epsilon) { return 8.0 / epsilon; }

QuadratureResult feynman_kernel_quadrature(double omega, double tau,
                                           const QuadratureOptions& opts,
                                           const KernelConvention& conv) {
  if (!(omega > 0.0)) throw ContractError("omega must be positive");
  if (!(opts.epsilon > 0.0)) throw ContractError("epsilon must be positive");
  if (!(opts.energy_cutoff > 2.0 * omega)) {
    throw ContractError("energy cutoff must be well above omega");
  }
  const double density = opts.pole_density > 0.0
                             ? opts.pole_density
                             : default_pole_density(opts.epsilon);
  if (density < 64.0) {
    throw ContractError("pole region under-resolved: fewer than 64 points "
                        "per unit E");
  }
  if (1.0 / density > opts.epsilon / 4.0) {
    throw ContractError("pole region under-resolved: node spacing exceeds "
                        "epsilon/4");
  }

  const double eps = opts.epsilon;
  const double atau = std::abs(tau);
  const int sigma = conv.sigma;

  double cutoff = opts.energy_cutoff;
  bool use_static_tail = atau == 0.0;
  if (opts.tail_correction && atau > 0.0 && atau * cutoff < 50.0) {
    // Extend until the integration-by-parts tail is accurate, within reason.
    const double needed = 50.0 / atau;
    if (needed <= 100.0 * opts.energy_cutoff) {
      cutoff = needed;
    } else {
      use_static_tail = true;
    }
  }

  // Pole half-width is eps / (2 omega); the innermost panel must not exceed
  // it for the Gauss rule to converge.
  const double pole_width = eps / (2.0 * omega);
  const double innermost =
      std::min(pole_width, static_cast<double>(kPanelOrder) / density);
  double widest = std::min(2.0, 0.5 * omega + 0.5);
  if (atau > 0.0) widest = std::min(widest, 2.0 * std::numbers::pi / atau);

  std::vector<double> right;  // breakpoints in [omega, cutoff]
  graded_breakpoints(omega, cutoff, innermost, widest, right);
  std::vector<double> inner;  // breakpoints in [0, omega), from the pole down
  graded_breakpoints(omega, 0.0, innermost, widest, inner);

  std::vector<double> nodes;
  nodes.reserve(2 * (right.size() + inner.size()) + 3);
  nodes.push_back(0.0);
  for (auto it = inner.rbegin(); it != inner.rend(); ++it) {
    if (*it > 0.0) nodes.push_back(*it);
  }
  nodes.push_back(omega);
  nodes.insert(nodes.end(), right.begin(), right.end());
  // Mirror onto negative energies.
  std::vector<double> mesh;
  mesh.reserve(2 * nodes.size());
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    if (*it > 0.0) mesh.push_back(-*it);
  }
  mesh.insert(mesh.end(), nodes.begin(), nodes.end());

  const double w2 = omega * omega;
  const auto integrand = [&](double e) {
    const Complex phase(std::cos(sigma * e * tau), std::sin(sigma * e * tau));
    return phase / Complex(e * e - w2, eps);
  };

  Complex sum{};
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    sum += PanelRule::integrate(integrand, mesh[i], mesh[i + 1]);
  }

  QuadratureResult out;
  out.value = sum / (2.0 * std::numbers::pi);
  out.evaluations = (mesh.size() - 1) * kPanelOrder;
  const double tail = use_static_tail ? static_tail(omega, cutoff)
                                      : oscillatory_tail(omega, atau, cutoff);
  out.truncation_estimate = std::abs(tail);
  if (opts.tail_correction) out.value += tail;
  return out;
}

Complex richardson_to_zero(std::span<const double> abscissae,
                           std::span<const Complex> values) {
  if (abscissae.size() != values.size() || values.empty()) {
    throw ContractError("richardson_to_zero needs matching, non-empty inputs");
  }
  std::vector<Complex> p(values.begin(), values.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      const double xi = abscissae[i];
      const double xj = abscissae[i + m];
      p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
    }
  }
  return p[0];
}

}  // namespace pseudodyn
