#include "pseudodyn/gaussian.hpp"

#include <algorithm>
#include <stdexcept>

namespace pseudodyn {

namespace {

CMatrix symmetrized(const CMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
  }
  return out;
}

void require_square(const CMatrix& m, std::size_t n, const char* what) {
  if (m.rows() != static_cast<Eigen::Index>(n) ||
      m.cols() != static_cast<Eigen::Index>(n)) {
    throw ContractError(std::string(what) + " has the wrong dimensions");
  }
}

void require_size(const CVector& v, std::size_t n, const char* what) {
  if (v.size() != static_cast<Eigen::Index>(n)) {
    throw ContractError(std::string(what) + " has the wrong dimension");
  }
}

double max_abs(const CMatrix& m) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    out = std::max(out, std::abs(m.data()[i]));
  }
  return out;
}

}  // namespace

CVector to_eigen(const ModeVector& v) { return to_eigen(v.values()); }

CVector to_eigen(std::span<const Complex> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v[i];
  }
  return out;
}

CMatrix pairing_matrix(const ModeSpace& ms, std::span<const Complex> values) {
  if (values.size() != ms.size()) {
    throw ContractError("pairing values must have one entry per mode");
  }
  const auto n = static_cast<Eigen::Index>(ms.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    out(static_cast<Eigen::Index>(i),
        static_cast<Eigen::Index>(ms.partner(i))) = values[i];
  }
  return out;
}

CMatrix pairing_matrix(const ModeSpace& ms, std::span<const double> values) {
  std::vector<Complex> c(values.begin(), values.end());
  return pairing_matrix(ms, std::span<const Complex>(c));
}

CMatrix uniform_pairing(const ModeSpace& ms, Complex value) {
  std::vector<Complex> c(ms.size(), value);
  return pairing_matrix(ms, std::span<const Complex>(c));
}

GaussianCoefficients::GaussianCoefficients(CMatrix a, CVector b, Complex c)
    : b_(std::move(b)), c_(c) {
  require_square(a, static_cast<std::size_t>(b_.size()), "A");
  a_ = symmetrized(a);
}

GaussianCoefficients GaussianCoefficients::zero(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return GaussianCoefficients(CMatrix::Zero(m, m), CVector::Zero(m), 0.0);
}

QuadraticPolynomial QuadraticPolynomial::zero(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return {CMatrix::Zero(m, m), CVector::Zero(m), 0.0};
}

Complex QuadraticPolynomial::operator()(const CVector& u) const {
  require_size(u, static_cast<std::size_t>(q1.size()), "u");
  return (u.transpose() * q2 * u)(0, 0) + (q1.transpose() * u)(0, 0) + q0;
}

double QuadraticPolynomial::max_abs_q2() const { return max_abs(q2); }

double QuadraticPolynomial::max_abs_q1() const { return max_abs(q1); }

QuadraticPolynomial operator-(const QuadraticPolynomial& lhs,
                              const QuadraticPolynomial& rhs) {
  return {lhs.q2 - rhs.q2, lhs.q1 - rhs.q1, lhs.q0 - rhs.q0};
}

Complex exponent(const GaussianCoefficients& g, const CVector& u) {
  require_size(u, g.size(), "u");
  // Bilinear products without conjugation: b.u = sum b_k u_k.
  const Complex quad = (u.transpose() * g.A() * u)(0, 0);
  const Complex lin = (g.b().transpose() * u)(0, 0);
  return quad + lin + g.c();
}

Complex exponent(const GaussianCoefficients& g, const ModeVector& u) {
  return exponent(g, to_eigen(u));
}

Complex evaluate(const GaussianCoefficients& g, const CVector& u) {
  const Complex s = exponent(g, u);
  if (s.real() > 500.0) {
    throw std::overflow_error("Gaussian exponent too large to exponentiate");
  }
  return std::exp(s);
}

Complex evaluate(const GaussianCoefficients& g, const ModeVector& u) {
  return evaluate(g, to_eigen(u));
}

CVector exponent_gradient(const GaussianCoefficients& g, const CVector& u) {
  require_size(u, g.size(), "u");
  return 2.0 * (g.A() * u) + g.b();
}

CVector gradient_at(const GaussianCoefficients& g, const CVector& u) {
  return exponent_gradient(g, u) * evaluate(g, u);
}

ModeVector gradient_at(const GaussianCoefficients& g, const ModeVector& u,
                       const ModeSpace& ms) {
  const CVector grad = gradient_at(g, to_eigen(u));
  return ModeVector::from_values(
      ms, std::vector<Complex>(grad.data(), grad.data() + grad.size()));
}

QuadraticPolynomial apply_first_order(const GaussianCoefficients& g,
                                      const CVector& weights,
                                      const CMatrix& shift) {
  const std::size_t n = g.size();
  require_size(weights, n, "weights");
  require_square(shift, n, "shift");
  // sum_k u_k w_k (2 (A u)_k + b_k) = u^T (2 W A) u + (w o b).u
  const CMatrix wa = weights.asDiagonal() * g.A();
  QuadraticPolynomial out;
  out.q2 = symmetrized(2.0 * wa + shift);
  out.q1 = weights.cwiseProduct(g.b());
  out.q0 = 0.0;
  return out;
}

QuadraticPolynomial apply_second_order(const GaussianCoefficients& g,
                                       const CMatrix& curvature,
                                       const CMatrix& potential) {
  const std::size_t n = g.size();
  require_square(curvature, n, "curvature");
  require_square(potential, n, "potential");
  const CMatrix c = symmetrized(curvature);
  const CMatrix& a = g.A();
  // d^2 e^S / du_k du_k' = (g_k g_k' + 2 A_kk') e^S with g = 2 A u + b.
  QuadraticPolynomial out;
  out.q2 = symmetrized(potential + 4.0 * (a * c * a));
  out.q1 = 4.0 * (a * (c * g.b()));
  // Plain loops keep the summation order fixed: the trace part is compared
  // bit-for-bit against an independent mode sum.
  Complex bcb{};
  Complex trace{};
  const auto m = static_cast<Eigen::Index>(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (c(i, j) == Complex{}) continue;
      bcb += g.b()(i) * c(i, j) * g.b()(j);
      trace += c(i, j) * 2.0 * a(i, j);
    }
  }
  out.q0 = bcb + trace;
  return out;
}

GaussianCoefficients rescale(const GaussianCoefficients& g, Complex lambda) {
  if (lambda == Complex{}) throw ContractError("rescale factor must be nonzero");
  return GaussianCoefficients(g.A() * (lambda * lambda), g.b() * lambda, g.c());
}

}  // namespace pseudodyn
