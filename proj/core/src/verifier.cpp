#include "pseudodyn/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pseudodyn {

namespace {

constexpr Complex kI{0.0, 1.0};

CVector frequency_vector(const ModeSpace& ms) {
  CVector w(static_cast<Eigen::Index>(ms.size()));
  for (std::size_t k = 0; k < ms.size(); ++k) {
    w(static_cast<Eigen::Index>(k)) = ms.frequencies()[k];
  }
  return w;
}

// i dS/dT for a state whose b evolves as exp(-i omega T): omega o b.
CVector time_derivative_linear(const EvolutionState& st) {
  return frequency_vector(st.ms).cwiseProduct(st.g.b());
}

void add_state_parameters(ResidualReport& r, const EvolutionState& st) {
  r.parameters = {{"N", st.ms.num_modes()},
                  {"m", st.ms.mass()},
                  {"L", st.ms.box_length()},
                  {"T", st.T},
                  {"h", st.ms.hbar()},
                  {"lambda_re", st.calib.lambda.real()},
                  {"lambda_im", st.calib.lambda.imag()},
                  {"sigma", static_cast<double>(st.calib.sigma)}};
}

EvolutionState neighbour(const EvolutionState& st, double T) {
  return evolution_functional(st.ms, st.v_hat, T, st.conv, st.calib);
}

// Directly rebuilt states at T - 2dT, T - dT, T + dT, T + 2dT.
struct Neighbours {
  std::array<EvolutionState, 4> states;
  double dT;
  int stencil;

  Neighbours(const EvolutionState& st, double step, int points)
      : states{neighbour(st, st.T - 2.0 * step), neighbour(st, st.T - step),
               neighbour(st, st.T + step), neighbour(st, st.T + 2.0 * step)},
        dT(step),
        stencil(points) {}

  // Central difference of Phi(T, u) / Phi(T, u) in T. The fourth-order
  // stencil keeps the truncation error of the fastest lattice modes below
  // the rounding floor at dT = 1e-4.
  Complex log_derivative(const EvolutionState& st, const CVector& u) const {
    const Complex s0 = exponent(st.g, u);
    std::array<Complex, 4> f;
    for (std::size_t i = 0; i < 4; ++i) {
      f[i] = std::exp(exponent(states[i].g, u) - s0);
    }
    if (stencil == 3) return (f[2] - f[1]) / (2.0 * dT);
    return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * dT);
  }
};

void require_fd_room(const EvolutionState& st, const NumericCheckOptions& opts) {
  if (!(opts.dT > 0.0) || st.T < 2.0 * opts.dT) {
    throw ContractError("finite-difference check needs dT > 0 and T >= 2 dT");
  }
  if (opts.stencil != 3 && opts.stencil != 5) {
    throw ContractError("finite-difference stencil must be 3 or 5");
  }
}

std::vector<CVector> scaled_samples(std::size_t dim, const NumericCheckOptions& opts) {
  auto samples = random_u_samples(dim, opts.u_samples, opts.seed);
  for (auto& u : samples) u *= opts.u_scale;
  return samples;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void ResidualReport::finalize() {
  const bool any_judged = std::any_of(metrics.begin(), metrics.end(),
                                      [](const Metric& m) { return m.judged(); });
  if (!any_judged) {
    verdict = Verdict::kInconclusive;
    return;
  }
  const bool all_pass = std::all_of(metrics.begin(), metrics.end(),
                                    [](const Metric& m) { return m.pass(); });
  verdict = all_pass ? Verdict::kPass : Verdict::kFail;
}

const Metric& ResidualReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw std::out_of_range("no metric named " + name);
}

std::vector<CVector> random_u_samples(std::size_t dim, int count,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    CVector u(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const double re = uni(rng);
      const double im = uni(rng);
      u(k) = Complex(re, im);
    }
    out.push_back(std::move(u));
  }
  return out;
}

QuadraticPolynomial first_order_residual(const EvolutionState& st, Complex c1,
                                         Complex c2) {
  const std::size_t n = st.ms.size();
  QuadraticPolynomial lhs = QuadraticPolynomial::zero(n);
  lhs.q1 = time_derivative_linear(st);
  const QuadraticPolynomial rhs = apply_first_order(
      st.g, c1 * frequency_vector(st.ms), uniform_pairing(st.ms, -c2));
  return lhs - rhs;
}

CMatrix hamiltonian_curvature(const ModeSpace& ms, const Eq13Convention& conv) {
  std::vector<Complex> values(ms.size());
  const double h2 = ms.hbar() * ms.hbar();
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const double w = ms.frequencies()[k];
    values[k] = 0.5 * conv.curvature_sign * conv.source_phase_sq * h2 * w * w;
  }
  return pairing_matrix(ms, std::span<const Complex>(values));
}

CMatrix hamiltonian_potential(const ModeSpace& ms, const Eq13Convention& conv) {
  return uniform_pairing(ms, 0.5 * conv.source_phase_sq);
}

QuadraticPolynomial second_order_residual(const EvolutionState& st,
                                          const Eq13Convention& conv) {
  const std::size_t n = st.ms.size();
  QuadraticPolynomial lhs = QuadraticPolynomial::zero(n);
  lhs.q1 = st.ms.hbar() * time_derivative_linear(st);
  const QuadraticPolynomial h =
      apply_second_order(st.g, hamiltonian_curvature(st.ms, conv),
                         hamiltonian_potential(st.ms, conv));
  return lhs - h;
}

Complex normal_ordering_trace(const EvolutionState& st,
                              const Eq13Convention& conv) {
  const CMatrix curvature = hamiltonian_curvature(st.ms, conv);
  const CMatrix& a = st.g.A();
  Complex trace{};
  for (std::size_t k = 0; k < st.ms.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const auto p = static_cast<Eigen::Index>(st.ms.partner(k));
    trace += curvature(i, p) * 2.0 * a(i, p);
  }
  return trace;
}

ResidualReport residual_eq14(const EvolutionState& st, const Tolerances& tol,
                             const NumericCheckOptions& opts) {
  ResidualReport r;
  r.identity = "first_order_evolution";
  r.seed = opts.seed;
  add_state_parameters(r, st);
  r.parameters.emplace_back("c1", st.calib.c1.real());
  r.parameters.emplace_back("c2", st.calib.c2.real());
  r.parameters.emplace_back("dT", opts.dT);
  r.parameters.emplace_back("stencil", opts.stencil);
  r.parameters.emplace_back("u_scale", opts.u_scale);
  r.parameters.emplace_back("u_samples", opts.u_samples);

  const QuadraticPolynomial res = first_order_residual(st, st.calib.c1, st.calib.c2);
  r.metrics.push_back({"q2_residual", res.max_abs_q2(), tol.coefficient});
  r.metrics.push_back({"q1_residual", res.max_abs_q1(), tol.coefficient});
  r.metrics.push_back({"q0_residual", std::abs(res.q0), tol.coefficient});

  require_fd_room(st, opts);
  const Neighbours around(st, opts.dT, opts.stencil);
  const CVector w = frequency_vector(st.ms);
  double worst = 0.0;
  for (const CVector& u : scaled_samples(st.ms.size(), opts)) {
    const Complex lhs = kI * around.log_derivative(st, u);
    const CVector grad = exponent_gradient(st.g, u);
    Complex rhs{};
    for (std::size_t k = 0; k < st.ms.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const auto p = static_cast<Eigen::Index>(st.ms.partner(k));
      rhs += u(i) * (st.calib.c1 * w(i) * grad(i) - st.calib.c2 * u(p));
    }
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  r.metrics.push_back({"fd_residual", worst, tol.numeric});
  r.finalize();
  return r;
}

ResidualReport residual_eq13(const EvolutionState& st, const Tolerances& tol,
                             const NumericCheckOptions& opts) {
  const Eq13Convention& conv = st.calib.second_order;
  ResidualReport r;
  r.identity = "second_order_normal_ordered";
  r.seed = opts.seed;
  add_state_parameters(r, st);
  r.parameters.emplace_back("curvature_sign", conv.curvature_sign);
  r.parameters.emplace_back("source_phase_sq", conv.source_phase_sq);
  r.parameters.emplace_back("dT", opts.dT);
  r.parameters.emplace_back("stencil", opts.stencil);
  r.parameters.emplace_back("u_scale", opts.u_scale);
  r.parameters.emplace_back("u_samples", opts.u_samples);

  const QuadraticPolynomial res = second_order_residual(st, conv);
  r.metrics.push_back({"q2_residual", res.max_abs_q2(), tol.second_order});
  r.metrics.push_back({"q1_residual", res.max_abs_q1(), tol.second_order});
  r.reported_constant = {"g_of_T", res.q0};

  // With b = 0 the constant is the ordering trace alone; it must agree
  // bit-for-bit with the mode-by-mode sum.
  EvolutionState no_linear = st;
  no_linear.g = GaussianCoefficients(st.g.A(),
                                     CVector::Zero(st.g.b().size()), st.g.c());
  const Complex from_algebra = -second_order_residual(no_linear, conv).q0;
  const Complex direct = normal_ordering_trace(st, conv);
  r.metrics.push_back({"normal_ordering_trace_mismatch",
                       std::abs(from_algebra - direct), 0.0});

  // Pointwise evaluation of (i h dT - H) Phi / Phi from the gradient at each
  // sample, independent of the coefficient algebra above.
  const CMatrix curvature = hamiltonian_curvature(st.ms, conv);
  const CMatrix potential = hamiltonian_potential(st.ms, conv);
  const CVector dt_linear = st.ms.hbar() * time_derivative_linear(st);
  const auto samples = scaled_samples(st.ms.size(), opts);

  require_fd_room(st, opts);
  const Neighbours around(st, opts.dT, opts.stencil);

  const double scale = std::max(1.0, std::abs(res.q0));
  double spread = 0.0;
  double fd_spread = 0.0;
  for (const CVector& u : samples) {
    const CVector grad = exponent_gradient(st.g, u);
    Complex h_part{};
    for (std::size_t k = 0; k < st.ms.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const auto p = static_cast<Eigen::Index>(st.ms.partner(k));
      h_part += potential(i, p) * u(i) * u(p) +
                curvature(i, p) * (grad(i) * grad(p) + 2.0 * st.g.A()(i, p));
    }
    const Complex analytic = (dt_linear.transpose() * u)(0, 0) - h_part;
    spread = std::max(spread, std::abs(analytic - res.q0) / scale);

    const Complex fd = kI * st.ms.hbar() * around.log_derivative(st, u) - h_part;
    fd_spread = std::max(fd_spread, std::abs(fd - res.q0) /
                                        std::max(scale, std::abs(h_part)));
  }
  r.metrics.push_back({"u_spread", spread, tol.spread});
  r.metrics.push_back({"fd_residual", fd_spread, tol.numeric});
  r.finalize();
  return r;
}

double gradient_check(const GaussianCoefficients& g, int u_samples, double step,
                      std::uint64_t seed) {
  if (!(step > 0.0)) throw ContractError("gradient_check step must be positive");
  double worst = 0.0;
  for (const CVector& u : random_u_samples(g.size(), u_samples, seed)) {
    const CVector analytic = gradient_at(g, u);
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      CVector up = u;
      CVector down = u;
      up(k) += step;
      down(k) -= step;
      const Complex fd = (evaluate(g, up) - evaluate(g, down)) / (2.0 * step);
      num = std::max(num, std::abs(fd - analytic(k)));
      den = std::max(den, std::abs(analytic(k)));
    }
    worst = std::max(worst, den > 0.0 ? num / den : num);
  }
  return worst;
}

double semigroup_check(const ModeSpace& ms, const ModeVector& v_hat,
                       std::span<const double> partitions,
                       const KernelConvention& conv,
                       const ConventionCalibration& calib) {
  double total = 0.0;
  EvolutionState st = evolution_functional(ms, v_hat, 0.0, conv, calib);
  for (double step : partitions) {
    st = advance(st, step);
    total += step;
  }
  const EvolutionState direct = evolution_functional(ms, v_hat, total, conv, calib);
  double dev = std::abs(st.g.c() - direct.g.c());
  dev = std::max(dev, (st.g.A() - direct.g.A()).cwiseAbs().maxCoeff());
  dev = std::max(dev, (st.g.b() - direct.g.b()).cwiseAbs().maxCoeff());
  return dev;
}

}  // namespace pseudodyn
