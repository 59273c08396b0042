// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pseudodyn/propagator.hpp"
#include "pseudodyn/pseudodynamics.hpp"
#include "pseudodyn/qm_oracle.hpp"
#include "pseudodyn/verifier.hpp"

namespace pd = pseudodyn;

namespace {

constexpr pd::Complex kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::array<int, 4> kModes{2, 8, 16, 64};
const std::array<double, 3> kMasses{0.5, 1.0, 2.0};
const std::array<double, 3> kTimes{0.1, 1.0, 10.0};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

pd::ModeVector ones(const pd::ModeSpace& ms) {
  std::vector<pd::Complex> v(static_cast<std::size_t>(ms.k_max() + 1), 1.0);
  return pd::ModeVector::real_from_nonnegative(ms, v);
}

pd::ModeSpace lattice(int n, double m) { return pd::ModeSpace::build(n, kTwoPi, m, 1.0); }

std::vector<double> momentum_grid() {
  std::vector<double> p(32);
  for (int i = 0; i < 32; ++i) p[static_cast<std::size_t>(i)] = -2.0 + 4.0 * i / 31.0;
  return p;
}

// Criterion 1
void propagator(Outcome& o) {
  double worst = 0.0;
  double worst_extrapolated = 0.0;
  for (double w : {0.5, 1.0, 2.0}) {
    for (double tau : {0.0, 0.7, 2.0}) {
      const pd::Complex exact = pd::feynman_kernel_closed(w, tau);
      const std::array<double, 3> eps{4e-4, 2e-4, 1e-4};
      std::array<pd::Complex, 3> values;
      for (std::size_t i = 0; i < eps.size(); ++i) {
        pd::QuadratureOptions q;
        q.epsilon = eps[i];
        q.energy_cutoff = 1e3 * w;
        values[i] = pd::feynman_kernel_quadrature(w, tau, q).value;
      }
      worst = std::max(worst, std::abs(values[2] - exact) / std::abs(exact));
      worst_extrapolated = std::max(
          worst_extrapolated, std::abs(pd::richardson_to_zero(eps, values) - exact) / std::abs(exact));
    }
  }
  o.detail << "rel_err " << worst << ", extrapolated " << worst_extrapolated;
  o.require(worst < 1e-3, "quadrature within 1e-3");
  o.require(worst_extrapolated < 1e-5, "extrapolation within 1e-5");
}

// Criteria 2 and 3 share the calibration and the grid.
void residual_grid(Outcome& o, bool second_order) {
  double coeff = 0.0;
  double numeric = 0.0;
  double spread = 0.0;
  double trace = 0.0;
  int points = 0;
  for (int n : kModes) {
    for (double m : kMasses) {
      const auto ms = lattice(n, m);
      const auto calib = pd::calibrate(ms);
      for (double T : kTimes) {
        const auto st = pd::evolution_functional(ms, ones(ms), T, {}, calib);
        const auto r = second_order ? pd::residual_eq13(st) : pd::residual_eq14(st);
        ++points;
        o.require(r.passed(), "verdict at N=" + std::to_string(n));
        coeff = std::max({coeff, r.metric("q2_residual").value, r.metric("q1_residual").value});
        numeric = std::max(numeric, r.metric("fd_residual").value);
        if (second_order) {
          spread = std::max(spread, r.metric("u_spread").value);
          trace = std::max(trace, r.metric("normal_ordering_trace_mismatch").value);
        } else {
          coeff = std::max(coeff, r.metric("q0_residual").value);
        }
      }
    }
  }
  o.detail << points << " points, coeff " << coeff << ", fd " << numeric;
  if (second_order) {
    o.detail << ", u_spread " << spread << ", trace_mismatch " << trace;
    o.require(coeff < 1e-10 && spread < 1e-9 && trace == 0.0, "second-order bounds");
  } else {
    o.require(coeff < 1e-12, "coefficient bound");
  }
  o.require(numeric < 1e-6, "finite-difference bound");
}

// Criterion 4
void structure(Outcome& o) {
  double phase = 0.0;
  for (int n : kModes) {
    for (double m : kMasses) {
      const auto ms = lattice(n, m);
      const auto calib = pd::calibrate(ms);
      const auto v = ones(ms);
      const auto at0 = pd::evolution_functional(ms, v, 0.0, {}, calib);
      const auto first = pd::evolution_functional(ms, v, kTimes[0], {}, calib);
      for (double T : kTimes) {
        const auto st = pd::evolution_functional(ms, v, T, {}, calib);
        o.require(st.g.A() == first.g.A(), "A independent of T");
        for (Eigen::Index k = 0; k < st.g.b().size(); ++k) {
          const double w = ms.frequencies()[static_cast<std::size_t>(k)];
          phase = std::max(phase,
                           std::abs(st.g.b()(k) / at0.g.b()(k) - std::exp(-kI * (w * T))));
        }
      }
    }
  }
  const auto ms = lattice(16, 1.0);
  const auto calib = pd::calibrate(ms);
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> pieces(2, 8);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  double semigroup = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> parts(static_cast<std::size_t>(pieces(rng)));
    double total = 0.0;
    for (auto& x : parts) total += (x = weight(rng));
    for (auto& x : parts) x *= 3.0 / total;
    semigroup = std::max(semigroup, pd::semigroup_check(ms, ones(ms), parts, {}, calib));
  }
  o.detail << "phase " << phase << ", semigroup " << semigroup;
  o.require(phase < 1e-12, "linear phase law");
  o.require(semigroup < 1e-12, "semigroup");
}

// Criterion 5
void relation5(Outcome& o) {
  const pd::QMGrid grid;
  const auto p = momentum_grid();
  struct Case {
    const char* name;
    double T;
    pd::DriveSeries drive;
    double tol;
  };
  const std::array<Case, 3> cases{
      Case{"static", 0.0, {}, 1e-3},
      Case{"free", 1.0, {}, 1e-2},
      Case{"driven", 2.0,
           pd::DriveSeries::sample(0.0, 2.0, grid.dt, [](double t) { return std::sin(t); }),
           1e-2}};
  for (const auto& c : cases) {
    const auto lhs = pd::relation5_lhs(grid, c.drive, 0.0, c.T, p, p);
    const auto rhs = pd::relation5_rhs_matrix(p, p, c.drive, 0.0, c.T, grid.omega, grid.hbar);
    const auto r = pd::compare_relation5(lhs, rhs, c.tol);
    o.detail << c.name << " " << r.metric("ratio_spread").value << "  ";
    o.require(r.passed(), c.name);
  }
}

// Criterion 6: the N = 2 lattice has modes with omega = 1 and sqrt 2.
void mode_bridge(Outcome& o) {
  const auto ms = lattice(2, 1.0);
  const auto st = pd::evolution_functional(ms, ones(ms), 1.0, {}, pd::calibrate(ms));
  const auto later = pd::advance(st, 0.5);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const pd::Complex field_phase = later.g.b()(i) / st.g.b()(i);
    pd::QMGrid grid;
    grid.omega = ms.frequencies()[k];
    const pd::Complex a = pd::measured_cross_kernel(grid, 0.0, 1.0, 0.3, 0.3);
    const pd::Complex b = pd::measured_cross_kernel(grid, 0.0, 1.5, 0.3, 0.3);
    const double err = std::abs(b / a - field_phase);
    o.detail << "omega " << grid.omega << " err " << err << "  ";
    o.require(err < 1e-6, "bridge phase");
  }
}

// Criterion 7
void gradients(Outcome& o) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 16; ++trial) {
    const Eigen::Index n = 8;
    pd::CMatrix a(n, n);
    pd::CVector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      b(i) = {u(rng), u(rng)};
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
    }
    const pd::GaussianCoefficients g(a, b, {u(rng), u(rng)});
    worst = std::max(worst, pd::gradient_check(g, 16, 1e-5, static_cast<std::uint64_t>(trial)));
  }
  o.detail << "max rel err " << worst;
  o.require(worst < 1e-6, "gradient");
}

// Criterion 8
void negative_controls(Outcome& o) {
  const auto ms = lattice(16, 1.0);
  const auto calib = pd::calibrate(ms);
  const auto st = pd::evolution_functional(ms, ones(ms), 1.0, {}, calib);
  o.require(pd::residual_eq14(st).passed() && pd::residual_eq13(st).passed(),
            "unperturbed state passes");

  pd::CMatrix a = st.g.A();
  const auto i = static_cast<Eigen::Index>(ms.index_of(3));
  const auto j = static_cast<Eigen::Index>(ms.index_of(-3));
  a(i, j) += 1e-3;
  a(j, i) += 1e-3;
  auto perturbed = st;
  perturbed.g = pd::GaussianCoefficients(a, st.g.b(), st.g.c());
  const bool perturbed_fails =
      !pd::residual_eq14(perturbed).passed() && !pd::residual_eq13(perturbed).passed();
  o.require(perturbed_fails, "perturbed A fails");

  auto flipped_calib = calib;
  flipped_calib.lambda *= kI;  // lambda^2 changes sign
  const auto flipped = pd::evolution_functional(ms, ones(ms), 1.0, {}, flipped_calib);
  const bool flipped_fails =
      !pd::residual_eq14(flipped).passed() && !pd::residual_eq13(flipped).passed();
  o.require(flipped_fails, "flipped calibration fails");

  const pd::QMGrid grid;
  const auto p = momentum_grid();
  const auto lhs = pd::relation5_lhs(grid, {}, 0.0, 1.0, p, p);
  const auto rhs = pd::relation5_rhs_matrix(p, p, {}, 0.0, 1.0, 1.2 * grid.omega, grid.hbar);
  const auto r = pd::compare_relation5(lhs, rhs, 1e-2);
  o.require(r.verdict == pd::Verdict::kFail, "mismatched omega fails");
  o.detail << "perturbed " << (perturbed_fails ? "fail" : "pass") << ", flipped "
           << (flipped_fails ? "fail" : "pass") << ", omega mismatch spread "
           << r.metric("ratio_spread").value;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"propagator closed form vs quadrature", 5.0, propagator},
      {"first-order evolution law", 10.0, [](Outcome& o) { residual_grid(o, false); }},
      {"second-order identity up to g(T)", 10.0, [](Outcome& o) { residual_grid(o, true); }},
      {"evolution structure", 0.0, structure},
      {"QM relation at oscillator scale", 30.0, relation5},
      {"mode-bridge coherence", 0.0, mode_bridge},
      {"gradient checks", 0.0, gradients},
      {"negative controls", 0.0, negative_controls},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0) o.require(secs < c.budget_s, "runtime budget");
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", index,
                c.name, o.detail.str().c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", index - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
