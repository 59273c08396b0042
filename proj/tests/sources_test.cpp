#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pseudodyn/sources.hpp"
#include "test_support.hpp"

namespace pseudodyn {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModeVector random_field(const ModeSpace& ms, std::mt19937_64& rng) {
  std::vector<Complex> v(ms.size());
  for (auto& x : v) x = testing::random_complex(rng);
  return ModeVector::from_values(ms, v);
}

// log Z written out from the double integral over the two layers, term by
// term, with the textbook kernel.
Complex log_z_by_hand(const ModeSpace& ms, const ModeVector& u, const ModeVector& v,
                      double T, double T0) {
  Complex sum{};
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const std::size_t p = ms.partner(k);
    const double w = ms.frequencies()[k];
    const Complex d0 = -kI / (2.0 * w);
    const Complex dt = -kI / (2.0 * w) * std::exp(-kI * (w * std::abs(T - T0)));
    sum += u[k] * u[p] * d0 + v[k] * v[p] * d0 - u[k] * v[p] * dt - v[k] * u[p] * dt;
  }
  return -kI / (2.0 * ms.hbar()) * sum;
}

TEST(DeltaPair, Construction) {
  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  const auto zero = ModeVector::zeros(ms);
  const auto s = delta_pair_source(ms, zero, zero, 1.0, 0.0);
  EXPECT_FALSE(s.drive.has_value());
  for (std::size_t k = 0; k < ms.size(); ++k) {
    EXPECT_EQ(delta_layers_transform(s, k, 0.7, {}), Complex(0.0));
  }
  EXPECT_THROW(delta_pair_source(ms, zero, zero, 0.0, 1.0), ContractError);
  const auto other = ModeSpace::build(6, kTwoPi, 1.0, 1.0);
  EXPECT_THROW(delta_pair_source(other, zero, ModeVector::zeros(other), 1.0, 0.0),
               ContractError);
}

TEST(DeltaPair, CoincidentLayersTransform) {
  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  std::mt19937_64 rng(1);
  const auto u = random_field(ms, rng);
  const auto v = random_field(ms, rng);
  const auto s = delta_pair_source(ms, u, v, 0.8, 0.8);
  for (int sigma : {1, -1}) {
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const double e = 1.3;
      const Complex expected = (u[k] - v[k]) * std::exp(kI * (sigma * e * 0.8));
      EXPECT_LT(std::abs(delta_layers_transform(s, k, e, KernelConvention::make(sigma)) -
                         expected),
                1e-15);
    }
  }
}

TEST(ZExponent, ZeroSourceGivesUnity) {
  const auto ms = ModeSpace::build(8, kTwoPi, 1.0, 1.0);
  const auto zero = ModeVector::zeros(ms);
  const auto s = delta_pair_source(ms, zero, zero, 2.0, 0.0);
  EXPECT_EQ(log_generating_functional(ms, s), Complex(0.0));
  EXPECT_EQ(std::exp(log_generating_functional(ms, s)), Complex(1.0));
}

TEST(ZExponent, SameTimeCoefficient) {
  const auto ms = ModeSpace::build(8, kTwoPi, 1.0, 1.0);
  const auto zero = ModeVector::zeros(ms);
  const auto z = z_exponent(ms, delta_pair_source(ms, zero, zero, 1.0, 0.0));
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const double w = ms.frequencies()[k];
    EXPECT_NEAR(std::abs(z.uu[k] - Complex(-1.0 / (4.0 * w), 0.0)), 0.0, 1e-16);
    EXPECT_EQ(z.vv[k], z.uu[k]);
  }
}

TEST(ZExponent, SameTimeCoefficientFromQuadrature) {
  // Independent route to the same number: the regularized energy integral,
  // extrapolated to eps -> 0, times -i / 2h.
  const double w = std::sqrt(2.0);
  const std::array<double, 3> eps{1e-2, 1e-3, 1e-4};
  std::array<Complex, 3> values;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    QuadratureOptions o;
    o.epsilon = eps[i];
    o.energy_cutoff = 1e3 * w;
    values[i] = feynman_kernel_quadrature(w, 0.0, o).value;
  }
  const Complex coefficient = -kI / 2.0 * richardson_to_zero(eps, values);
  EXPECT_NEAR(coefficient.real(), -1.0 / (4.0 * w), 1e-6);
  EXPECT_NEAR(coefficient.imag(), 0.0, 1e-6);
}

TEST(ZExponent, CrossCoefficientPhase) {
  for (double t : {0.0, 0.3, 1.0, 7.5}) {
    const auto ms = ModeSpace::build(16, kTwoPi, 0.5, 1.0);
    const auto zero = ModeVector::zeros(ms);
    const auto z = z_exponent(ms, delta_pair_source(ms, zero, zero, 2.0 + t, 2.0));
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const double w = ms.frequencies()[k];
      const Complex ratio = z.uv[k] / z.uu[k];
      EXPECT_NEAR(std::abs(ratio), 1.0, 1e-15);
      EXPECT_LT(std::abs(ratio + std::exp(-kI * (w * t))), 1e-14);
    }
  }
}

TEST(ZExponent, MatchesTermByTermExpansion) {
  std::mt19937_64 rng(7);
  for (double hbar : {1.0, 0.5}) {
    const auto ms = ModeSpace::build(8, 3.0, 1.3, hbar);
    const auto u = random_field(ms, rng);
    const auto v = random_field(ms, rng);
    const Complex got = log_generating_functional(ms, delta_pair_source(ms, u, v, 1.7, 0.4));
    const Complex expected = log_z_by_hand(ms, u, v, 1.7, 0.4);
    EXPECT_LT(std::abs(got - expected), 1e-13 * std::max(1.0, std::abs(expected)));
  }
}

TEST(ZExponent, QuadraticInTheSource) {
  std::mt19937_64 rng(8);
  const auto ms = ModeSpace::build(8, kTwoPi, 1.0, 1.0);
  const auto u = random_field(ms, rng);
  const auto v = random_field(ms, rng);
  std::vector<ModeVector> drive;
  for (int i = 0; i <= 20; ++i) drive.push_back(random_field(ms, rng));
  const auto s = add_smooth_drive(delta_pair_source(ms, u, v, 1.0, 0.0), drive, 0.05);
  const Complex base = log_generating_functional(ms, s);
  for (double alpha : {-1.0, 0.5, 3.0}) {
    std::vector<ModeVector> scaled;
    for (const auto& d : drive) scaled.push_back(d.scaled(alpha));
    const auto t = add_smooth_drive(
        delta_pair_source(ms, u.scaled(alpha), v.scaled(alpha), 1.0, 0.0), scaled, 0.05);
    const Complex got = log_generating_functional(ms, t);
    EXPECT_LT(std::abs(got - alpha * alpha * base), 1e-13 * std::abs(alpha * alpha * base));
  }
}

TEST(ZExponent, LayersExchangeWithSignFlip) {
  // Swapping which layer carries u and which carries v, with the relative
  // sign flipped, is j -> -j on the two delta layers.
  std::mt19937_64 rng(9);
  const auto ms = ModeSpace::build(8, kTwoPi, 1.0, 1.0);
  const auto u = random_field(ms, rng);
  const auto v = random_field(ms, rng);
  const Complex a = log_generating_functional(ms, delta_pair_source(ms, u, v, 1.4, 0.2));
  const Complex c = log_generating_functional(
      ms, delta_pair_source(ms, u.scaled(-1.0), v.scaled(-1.0), 1.4, 0.2));
  EXPECT_EQ(a, c);
  // Relabelling the layers: uu and vv coefficients coincide and the cross
  // kernel depends on |T - T0|, so exchanging u and v leaves Z unchanged.
  const Complex swapped = log_generating_functional(ms, delta_pair_source(ms, v, u, 1.4, 0.2));
  EXPECT_LT(std::abs(swapped - a), 1e-15 * std::max(1.0, std::abs(a)) * 8);
}

TEST(Drive, ZeroDriveLeavesZUnchanged) {
  std::mt19937_64 rng(10);
  const auto ms = ModeSpace::build(8, kTwoPi, 1.0, 1.0);
  const auto u = random_field(ms, rng);
  const auto v = random_field(ms, rng);
  const auto bare = delta_pair_source(ms, u, v, 2.0, 0.0);
  const auto driven = add_smooth_drive(
      bare, std::vector<ModeVector>(2001, ModeVector::zeros(ms)), 1e-3);
  EXPECT_EQ(log_generating_functional(ms, bare), log_generating_functional(ms, driven));
}

TEST(Drive, SpanAndShapeChecks) {
  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  const auto zero = ModeVector::zeros(ms);
  const auto s = delta_pair_source(ms, zero, zero, 2.0, 0.0);
  EXPECT_THROW(add_smooth_drive(s, std::vector<ModeVector>(1001, zero), 1e-3), ContractError);
  EXPECT_THROW(add_smooth_drive(s, std::vector<ModeVector>(1, zero), 2.0), ContractError);
  EXPECT_THROW(add_smooth_drive(s, std::vector<ModeVector>(3, zero), 0.0), ContractError);
  const auto wrong = ModeVector::zeros(ModeSpace::build(6, kTwoPi, 1.0, 1.0));
  EXPECT_THROW(add_smooth_drive(s, std::vector<ModeVector>(3, wrong), 1.0), ContractError);
  EXPECT_NO_THROW(add_smooth_drive(s, std::vector<ModeVector>(3, zero), 1.0));
}

TEST(Drive, SineDriveAgainstExactIntegral) {
  // Int_0^2 sin(t) D(2 - t) dt for D = -(i / 2w) e^{-i w |tau|}, from
  // sin t = (e^{it} - e^{-it}) / 2i and Int_0^2 e^{iat} dt.
  const double w = std::sqrt(2.0);
  auto segment = [](double a) { return (std::exp(kI * (2.0 * a)) - 1.0) / (kI * a); };
  const Complex exact = -kI / (2.0 * w) * std::exp(-kI * (2.0 * w)) / (2.0 * kI) *
                        (segment(1.0 + w) - segment(w - 1.0));

  std::vector<Complex> f(2001);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(1e-3 * static_cast<double>(i));
  const Complex trap = kernel_against_samples(w, 2.0, 0.0, 1e-3, f);
  EXPECT_LT(std::abs(trap - exact), 1e-6);

  // The same drive on the lattice: only the k = +-1 modes carry it.
  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  const auto zero = ModeVector::zeros(ms);
  std::vector<ModeVector> samples;
  for (const auto& x : f) {
    std::vector<Complex> v(ms.size());
    v[ms.index_of(1)] = v[ms.index_of(-1)] = x;
    samples.push_back(ModeVector::from_values(ms, v));
  }
  const auto s = add_smooth_drive(delta_pair_source(ms, ModeVector::basis(ms, 1), zero, 2.0, 0.0),
                                  samples, 1e-3);
  const auto z = z_exponent(ms, s);
  const Complex expected_linear = 2.0 * (-kI / 2.0) * exact;
  EXPECT_LT(std::abs(z.u_linear[ms.index_of(1)] - expected_linear), 2e-6);
  EXPECT_EQ(z.u_linear[ms.index_of(0)], Complex(0.0));
}

TEST(Drive, DoubleIntegralSymmetry) {
  std::mt19937_64 rng(12);
  std::vector<Complex> f(50), g(50);
  for (auto& x : f) x = testing::random_complex(rng);
  for (auto& x : g) x = testing::random_complex(rng);
  EXPECT_LT(std::abs(kernel_double_integral(1.2, 0.02, f, g) -
                     kernel_double_integral(1.2, 0.02, g, f)),
            1e-14);
  EXPECT_THROW(kernel_double_integral(1.0, 0.1, f, std::span(g).first(10)), ContractError);
}

}  // namespace
}  // namespace pseudodyn
