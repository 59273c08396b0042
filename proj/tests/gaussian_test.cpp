#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pseudodyn/gaussian.hpp"
#include "pseudodyn/verifier.hpp"
#include "test_support.hpp"

namespace pseudodyn {
namespace {

using testing::random_complex;
using testing::random_gaussian;
using testing::random_symmetric;
using testing::random_vector;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Central differences of evaluate(), the reference for every operator below.
Complex d1(const GaussianCoefficients& g, CVector u, Eigen::Index k, double h) {
  CVector up = u;
  up(k) += h;
  u(k) -= h;
  return (evaluate(g, up) - evaluate(g, u)) / (2.0 * h);
}

Complex d2(const GaussianCoefficients& g, const CVector& u, Eigen::Index k,
           Eigen::Index l, double h) {
  auto at = [&](double sk, double sl) {
    CVector v = u;
    v(k) += sk;
    v(l) += sl;
    return evaluate(g, v);
  };
  if (k == l) return (at(h, 0) - 2.0 * evaluate(g, u) + at(-h, 0)) / (h * h);
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

TEST(Evaluate, TrivialCases) {
  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  const auto zero = GaussianCoefficients::zero(4);
  EXPECT_EQ(evaluate(zero, ModeVector::basis(ms, 1)), Complex(1.0));

  CVector b = CVector::Zero(4);
  b(2) = 1.0;
  const GaussianCoefficients linear(CMatrix::Zero(4, 4), b, 0.0);
  CVector u = CVector::Zero(4);
  u(2) = 2.0;
  EXPECT_NEAR(std::abs(evaluate(linear, u) - std::exp(2.0)), 0.0, 1e-14);

  const Complex a(0.3, -0.2);
  const std::size_t i = ms.index_of(1);
  const std::size_t p = ms.partner(i);
  CMatrix pair = CMatrix::Zero(4, 4);
  pair(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = a;
  pair(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = a;
  const GaussianCoefficients paired(pair, CVector::Zero(4), 0.0);
  EXPECT_NEAR(std::abs(evaluate(paired, ModeVector::basis(ms, 1)) - std::exp(2.0 * a)),
              0.0, 1e-15);
}

TEST(Evaluate, SymmetrizesAndChecksDimensions) {
  CMatrix a(2, 2);
  a << 1.0, 2.0, 4.0, 3.0;
  const GaussianCoefficients g(a, CVector::Zero(2), 0.0);
  EXPECT_EQ(g.A()(0, 1), Complex(3.0));
  EXPECT_EQ(g.A()(1, 0), Complex(3.0));
  EXPECT_THROW(GaussianCoefficients(CMatrix::Zero(2, 3), CVector::Zero(2), 0.0),
               ContractError);
  EXPECT_THROW(GaussianCoefficients(CMatrix::Zero(2, 2), CVector::Zero(3), 0.0),
               ContractError);
  EXPECT_THROW(evaluate(g, CVector::Zero(3)), ContractError);
}

TEST(Evaluate, OverflowGuard) {
  const GaussianCoefficients g(CMatrix::Zero(1, 1), CVector::Constant(1, 1.0), 0.0);
  CVector u(1);
  u(0) = 600.0;
  EXPECT_THROW(evaluate(g, u), std::overflow_error);
  EXPECT_EQ(exponent(g, u), Complex(600.0));
}

TEST(Gradient, TrivialCases) {
  std::mt19937_64 rng(3);
  const auto g = random_gaussian(5, rng);
  const CVector grad = gradient_at(g, CVector::Zero(5));
  for (Eigen::Index k = 0; k < 5; ++k) {
    EXPECT_NEAR(std::abs(grad(k) - g.b()(k) * std::exp(g.c())), 0.0, 1e-14);
  }
  const GaussianCoefficients c_only(CMatrix::Zero(5, 5), CVector::Zero(5), 0.7);
  EXPECT_EQ(gradient_at(c_only, random_vector(5, rng)).norm(), 0.0);

  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  EXPECT_THROW(gradient_at(g, ModeVector::zeros(ms), ms), ContractError);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 16; ++trial) {
    const auto g = random_gaussian(6, rng);
    const CVector u = random_vector(6, rng);
    const CVector analytic = gradient_at(g, u);
    for (Eigen::Index k = 0; k < 6; ++k) {
      const Complex fd = d1(g, u, k, 1e-5);
      EXPECT_LT(std::abs(fd - analytic(k)), 1e-6 * std::max(1.0, std::abs(analytic(k))));
    }
  }
}

TEST(Gradient, LinearExponentAgreesToRounding) {
  std::mt19937_64 rng(5);
  const GaussianCoefficients g(CMatrix::Zero(4, 4), random_vector(4, rng, 0.5), 0.0);
  EXPECT_LT(gradient_check(g, 16, 1e-5), 1e-9);
}

TEST(Gradient, StepSweepHasInteriorMinimum) {
  std::mt19937_64 rng(9);
  const auto g = random_gaussian(6, rng);
  const double coarse = gradient_check(g, 16, 1e-3);
  const double middle = gradient_check(g, 16, 1e-5);
  const double fine = gradient_check(g, 16, 1e-7);
  EXPECT_LT(middle, coarse);
  EXPECT_LT(middle, fine);
}

TEST(FirstOrder, TrivialCases) {
  std::mt19937_64 rng(2);
  const CMatrix s = random_symmetric(4, rng);
  const auto r = apply_first_order(GaussianCoefficients::zero(4), random_vector(4, rng), s);
  EXPECT_EQ(r.q2, s);
  EXPECT_EQ(r.q1.norm(), 0.0);
  EXPECT_EQ(r.q0, Complex(0.0));

  const auto g = random_gaussian(4, rng);
  const CMatrix minus = -s;
  const auto shift_only = apply_first_order(g, CVector::Zero(4), minus);
  EXPECT_EQ(shift_only.q2, minus);
  EXPECT_EQ(shift_only.q1.norm(), 0.0);
}

TEST(FirstOrder, SinglePairCoefficient) {
  const auto ms = ModeSpace::build(4, kTwoPi, 1.0, 1.0);
  const auto i = static_cast<Eigen::Index>(ms.index_of(1));
  const auto p = static_cast<Eigen::Index>(ms.index_of(-1));
  const Complex a(0.4, 0.1);
  const double w = ms.frequency(1);
  CMatrix am = CMatrix::Zero(4, 4);
  am(i, p) = am(p, i) = a;
  CVector weights = CVector::Zero(4);
  weights(i) = weights(p) = w;
  const auto r = apply_first_order(GaussianCoefficients(am, CVector::Zero(4), 0.0),
                                   weights, CMatrix::Zero(4, 4));
  // u_k w d/du_k of a (2 u_k u_-k) gives 2 a w u_k u_-k from each side.
  EXPECT_EQ(r.q2(i, p), 2.0 * a * w);
  EXPECT_EQ(r.q2(p, i), 2.0 * a * w);
  EXPECT_EQ(r.q2(i, i), Complex(0.0));
}

TEST(FirstOrder, MatchesOperatorOnEvaluate) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    const auto g = random_gaussian(5, rng, 0.5);
    const CVector w = random_vector(5, rng);
    const CMatrix s = random_symmetric(5, rng);
    const auto poly = apply_first_order(g, w, s);
    const CVector u = random_vector(5, rng, 0.7);
    Complex applied = 0.0;
    for (Eigen::Index k = 0; k < 5; ++k) {
      applied += u(k) * w(k) * d1(g, u, k, 1e-5);
      for (Eigen::Index l = 0; l < 5; ++l) applied += s(k, l) * u(k) * u(l) * evaluate(g, u);
    }
    const Complex ratio = applied / evaluate(g, u);
    EXPECT_LT(std::abs(ratio - poly(u)), 1e-5 * std::max(1.0, std::abs(poly(u))));
  }
}

TEST(SecondOrder, TrivialCases) {
  std::mt19937_64 rng(4);
  const CMatrix q = random_symmetric(4, rng);
  const CMatrix c = random_symmetric(4, rng);
  const auto constant = apply_second_order(GaussianCoefficients::zero(4), c, q);
  EXPECT_EQ(constant.q2, q);
  EXPECT_EQ(constant.q1.norm(), 0.0);
  EXPECT_EQ(constant.q0, Complex(0.0));

  const CVector b = random_vector(4, rng);
  const auto linear = apply_second_order(GaussianCoefficients(CMatrix::Zero(4, 4), b, 0.0),
                                         c, CMatrix::Zero(4, 4));
  EXPECT_EQ(linear.q2.norm(), 0.0);
  EXPECT_EQ(linear.q1.norm(), 0.0);
  const Complex expected = (b.transpose() * c * b)(0, 0);
  EXPECT_LT(std::abs(linear.q0 - expected), 1e-14);
}

TEST(SecondOrder, MatchesOperatorOnEvaluate) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const auto g = random_gaussian(4, rng, 0.5);
    const CMatrix c = random_symmetric(4, rng);
    const CMatrix q = random_symmetric(4, rng);
    const auto poly = apply_second_order(g, c, q);
    const CVector u = random_vector(4, rng, 0.7);
    Complex applied = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k) {
      for (Eigen::Index l = 0; l < 4; ++l) {
        applied += q(k, l) * u(k) * u(l) * evaluate(g, u) + c(k, l) * d2(g, u, k, l, 1e-4);
      }
    }
    const Complex ratio = applied / evaluate(g, u);
    EXPECT_LT(std::abs(ratio - poly(u)), 1e-5 * std::max(1.0, std::abs(poly(u))));
  }
}

TEST(Rescale, Basics) {
  std::mt19937_64 rng(6);
  const auto g = random_gaussian(4, rng);
  const auto same = rescale(g, 1.0);
  EXPECT_EQ(same.A(), g.A());
  EXPECT_EQ(same.b(), g.b());
  EXPECT_EQ(same.c(), g.c());
  const auto flipped = rescale(g, Complex(0.0, 1.0));
  EXPECT_EQ(flipped.A(), (-g.A()).eval());
  EXPECT_THROW(rescale(g, 0.0), ContractError);
}

TEST(Rescale, MatchesScaledArgument) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 16; ++trial) {
    const auto g = random_gaussian(5, rng, 0.5);
    const Complex lambda = random_complex(rng);
    const CVector u = random_vector(5, rng);
    const Complex lhs = exponent(rescale(g, lambda), u);
    const Complex rhs = exponent(g, (lambda * u).eval());
    EXPECT_LT(std::abs(lhs - rhs), 1e-14 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Rescale, CompositionToTheLastUlp) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 16; ++trial) {
    const auto g = random_gaussian(5, rng);
    const Complex l = random_complex(rng);
    const Complex m = random_complex(rng);
    const auto twice = rescale(rescale(g, l), m);
    const auto once = rescale(g, l * m);
    // Floating-point products are not associative, so "exact" means a few
    // rounding steps apart.
    const double scale = std::max(1.0, g.A().cwiseAbs().maxCoeff());
    EXPECT_LE(testing::max_abs_diff(twice.A(), once.A()), 8 * 2.3e-16 * scale);
    EXPECT_LE(testing::max_abs_diff(twice.b(), once.b()), 8 * 2.3e-16 * scale);
    EXPECT_EQ(twice.c(), once.c());
  }
}

TEST(Rescale, CompositionExactForPowersOfTwo) {
  std::mt19937_64 rng(12);
  const auto g = random_gaussian(5, rng);
  const Complex l(0.0, 2.0);
  const Complex m(0.5, 0.0);
  const auto twice = rescale(rescale(g, l), m);
  const auto once = rescale(g, l * m);
  EXPECT_EQ(twice.A(), once.A());
  EXPECT_EQ(twice.b(), once.b());
}

}  // namespace
}  // namespace pseudodyn
