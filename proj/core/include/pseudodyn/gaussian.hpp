#pragma once

#include <Eigen/Dense>

#include "pseudodyn/mode_space.hpp"

namespace pseudodyn {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

CVector to_eigen(const ModeVector& v);
CVector to_eigen(std::span<const Complex> v);

/// Matrix with entry (i, partner(i)) = values[i] and zeros elsewhere.
CMatrix pairing_matrix(const ModeSpace& ms, std::span<const Complex> values);
CMatrix pairing_matrix(const ModeSpace& ms, std::span<const double> values);
/// pairing_matrix with every value equal to `value`.
CMatrix uniform_pairing(const ModeSpace& ms, Complex value);

/// Coefficients of Phi(u) = exp(sum_{k,k'} A_{kk'} u_k u_{k'} + b.u + c).
///
/// The quadratic sum runs over all ordered pairs, so an unordered pair
/// (k, k') with k != k' contributes 2 A_{kk'} u_k u_{k'}. With this
/// convention dS/du_k = 2 (A u)_k + b_k.
class GaussianCoefficients {
 public:
  GaussianCoefficients() = default;
  /// Symmetrizes A as (A + A^T) / 2; throws on a dimension mismatch.
  GaussianCoefficients(CMatrix a, CVector b, Complex c);

  static GaussianCoefficients zero(std::size_t n);

  const CMatrix& A() const { return a_; }
  const CVector& b() const { return b_; }
  Complex c() const { return c_; }
  std::size_t size() const { return static_cast<std::size_t>(b_.size()); }

 private:
  CMatrix a_;
  CVector b_;
  Complex c_{};
};

/// u^T Q2 u + Q1.u + Q0, the ratio (L Phi) / Phi for a differential
/// operator L of order <= 2 applied to a Gaussian.
struct QuadraticPolynomial {
  CMatrix q2;
  CVector q1;
  Complex q0{};

  static QuadraticPolynomial zero(std::size_t n);

  Complex operator()(const CVector& u) const;
  double max_abs_q2() const;
  double max_abs_q1() const;

  friend QuadraticPolynomial operator-(const QuadraticPolynomial& lhs,
                                       const QuadraticPolynomial& rhs);
};

/// The exponent S(u); safe for any magnitude.
Complex exponent(const GaussianCoefficients& g, const CVector& u);
Complex exponent(const GaussianCoefficients& g, const ModeVector& u);

/// exp(S(u)). Throws std::overflow_error when Re S > 500; use `exponent`
/// and work with differences of exponents in that regime.
Complex evaluate(const GaussianCoefficients& g, const CVector& u);
Complex evaluate(const GaussianCoefficients& g, const ModeVector& u);

/// dS/du = 2 A u + b.
CVector exponent_gradient(const GaussianCoefficients& g, const CVector& u);
/// dPhi/du = (2 A u + b) Phi(u).
CVector gradient_at(const GaussianCoefficients& g, const CVector& u);
ModeVector gradient_at(const GaussianCoefficients& g, const ModeVector& u,
                       const ModeSpace& ms);

/// (sum_k u_k w_k d/du_k + sum_{kk'} s_{kk'} u_k u_{k'}) Phi / Phi.
QuadraticPolynomial apply_first_order(const GaussianCoefficients& g,
                                      const CVector& weights,
                                      const CMatrix& shift);

/// (sum_{kk'} q_{kk'} u_k u_{k'} + sum_{kk'} c_{kk'} d^2/du_k du_{k'}) Phi
/// / Phi. The constant term carries the ordering trace sum c_{kk'} 2A_{kk'}.
QuadraticPolynomial apply_second_order(const GaussianCoefficients& g,
                                       const CMatrix& curvature,
                                       const CMatrix& potential);

/// Coefficients of u -> Phi(lambda u): A -> lambda^2 A, b -> lambda b.
GaussianCoefficients rescale(const GaussianCoefficients& g, Complex lambda);

}  // namespace pseudodyn
