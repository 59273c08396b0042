#include "pseudodyn/qm_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "pseudodyn/sources.hpp"

namespace pseudodyn {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kEdgeLimit = 1e-8;

// Eighth-order central stencil for the second derivative.
constexpr std::array<double, 5> kSecondDerivative{
    -205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
constexpr int kHalfBand = static_cast<int>(kSecondDerivative.size()) - 1;

// Square band matrix with kHalfBand diagonals on each side, stored row by
// row. factor() is LU without pivoting, which is stable for the matrices
// used here: 1 + tau H with H positive definite, and 1 + i K with K real
// symmetric (Hermitian part equal to the identity).
template <typename T>
class BandMatrix {
 public:
  static constexpr int kWidth = 2 * kHalfBand + 1;

  explicit BandMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * kWidth) {}

  int size() const { return n_; }
  T& at(int i, int j) { return d_[index(i, j)]; }
  const T& at(int i, int j) const { return d_[index(i, j)]; }

  template <typename U>
  BandMatrix<U> scaled(U factor, U diagonal_shift) const {
    BandMatrix<U> out(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = std::max(0, i - kHalfBand); j <= std::min(n_ - 1, i + kHalfBand);
           ++j) {
        out.at(i, j) = factor * at(i, j);
      }
      out.at(i, i) += diagonal_shift;
    }
    return out;
  }

  void factor() {
    for (int i = 0; i < n_; ++i) {
      const T pivot = at(i, i);
      if (pivot == T(0)) throw std::runtime_error("band factorization: zero pivot");
      const int last = std::min(n_ - 1, i + kHalfBand);
      for (int r = i + 1; r <= last; ++r) {
        const T l = at(r, i) / pivot;
        at(r, i) = l;
        for (int c = i + 1; c <= last; ++c) at(r, c) -= l * at(i, c);
      }
    }
  }

  // x <- (LU)^{-1} x after factor().
  template <typename V>
  void solve_in_place(V* x) const {
    for (int r = 1; r < n_; ++r) {
      V acc = x[r];
      for (int c = std::max(0, r - kHalfBand); c < r; ++c) acc -= at(r, c) * x[c];
      x[r] = acc;
    }
    for (int r = n_ - 1; r >= 0; --r) {
      V acc = x[r];
      for (int c = r + 1; c <= std::min(n_ - 1, r + kHalfBand); ++c) {
        acc -= at(r, c) * x[c];
      }
      x[r] = acc / at(r, r);
    }
  }

  // y <- M x
  template <typename V>
  void multiply(const V* x, V* y) const {
    for (int r = 0; r < n_; ++r) {
      V acc{};
      for (int c = std::max(0, r - kHalfBand); c <= std::min(n_ - 1, r + kHalfBand);
           ++c) {
        acc += at(r, c) * x[c];
      }
      y[r] = acc;
    }
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * kWidth +
           static_cast<std::size_t>(j - i + kHalfBand);
  }

  int n_;
  std::vector<T> d_;
};

// H = -(h^2 / 2) d^2/dq^2 + omega^2 q^2 / 2 with zero data off the grid.
BandMatrix<double> oscillator_hamiltonian(const QMGrid& grid) {
  const int n = grid.n_points;
  const double dq = grid.spacing();
  const double kinetic = -0.5 * grid.hbar * grid.hbar / (dq * dq);
  const auto q = grid.positions();
  BandMatrix<double> h(n);
  for (int i = 0; i < n; ++i) {
    const double qi = q[static_cast<std::size_t>(i)];
    h.at(i, i) = kinetic * kSecondDerivative[0] + 0.5 * grid.omega * grid.omega * qi * qi;
    for (int d = 1; d <= kHalfBand; ++d) {
      const double c = kinetic * kSecondDerivative[static_cast<std::size_t>(d)];
      if (i - d >= 0) h.at(i, i - d) = c;
      if (i + d < n) h.at(i, i + d) = c;
    }
  }
  return h;
}

void check_edges(const CMatrix& states) {
  const Eigen::Index last = states.rows() - 1;
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    const double edge = std::max(std::abs(states(0, c)), std::abs(states(last, c)));
    if (edge > kEdgeLimit) {
      throw GridError("state reached the grid edge (amplitude " +
                      std::to_string(edge) + "); widen [q_min, q_max]");
    }
  }
}

void check_band(const QMGrid& grid, std::span<const double> ps) {
  const double band = grid.momentum_band();
  for (double p : ps) {
    if (std::abs(p) > band) {
      throw ContractError("momentum " + std::to_string(p) +
                          " outside the resolvable band " + std::to_string(band));
    }
  }
}

bool spans(const DriveSeries& d, double T0, double T) {
  const double tol = 1e-9 * std::max(1.0, std::abs(T));
  return std::abs(d.t0 - T0) <= tol && std::abs(d.t1() - T) <= tol;
}

}  // namespace

void QMGrid::validate() const {
  if (!(q_max > q_min)) throw ContractError("QMGrid needs q_max > q_min");
  if (n_points < 16) throw ContractError("QMGrid needs at least 16 points");
  if (!(dt > 0.0)) throw ContractError("QMGrid time step must be positive");
  if (!(omega > 0.0)) throw ContractError("QMGrid omega must be positive");
  if (!(hbar > 0.0)) throw ContractError("QMGrid hbar must be positive");
}

std::vector<double> QMGrid::positions() const {
  std::vector<double> q(static_cast<std::size_t>(n_points));
  const double dq = spacing();
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = q_min + dq * static_cast<double>(i);
  }
  return q;
}

double QMGrid::momentum_band() const {
  return 0.5 * std::numbers::pi * n_points / (q_max - q_min);
}

DriveSeries DriveSeries::zero(double t0, double t1) {
  return DriveSeries{t0, t1 - t0 > 0.0 ? t1 - t0 : 1.0, {0.0, 0.0}};
}

DriveSeries DriveSeries::sample(double t0, double t1, double dt,
                                const std::function<double(double)>& f) {
  if (!(dt > 0.0) || !(t1 > t0)) {
    throw ContractError("drive sampling needs dt > 0 and t1 > t0");
  }
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  if (steps == 0 || std::abs(steps * dt - (t1 - t0)) > 1e-9 * (t1 - t0)) {
    throw ContractError("drive step does not divide [t0, t1]");
  }
  DriveSeries d{t0, dt, {}};
  d.values.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    d.values[i] = f(t0 + dt * static_cast<double>(i));
  }
  return d;
}

double DriveSeries::at(double t) const {
  if (values.empty()) return 0.0;
  const double x = (t - t0) / dt;
  if (x <= 0.0) return values.front();
  const auto last = values.size() - 1;
  if (x >= static_cast<double>(last)) return values.back();
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return (1.0 - frac) * values[i] + frac * values[i + 1];
}

bool DriveSeries::identically_zero() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return v == 0.0; });
}

CVector ground_state(const QMGrid& grid, const GroundStateOptions& opts) {
  grid.validate();
  const int n = grid.n_points;
  const double dq = grid.spacing();
  const double tau = opts.tau_step > 0.0 ? opts.tau_step : 10.0 / grid.omega;

  // Backward-Euler imaginary-time step (1 + tau H / h) psi' = psi.
  BandMatrix<double> step =
      oscillator_hamiltonian(grid).scaled(tau / grid.hbar, 1.0);
  step.factor();

  // Broad, slightly lopsided start so the relaxation has real work to do.
  const auto q = grid.positions();
  Eigen::VectorXd psi(n);
  for (int i = 0; i < n; ++i) {
    const double qi = q[static_cast<std::size_t>(i)];
    psi(i) = std::exp(-qi * qi / 8.0) * (1.0 + 0.2 * std::tanh(qi));
  }
  psi /= std::sqrt(psi.squaredNorm() * dq);

  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd next = psi;
    step.solve_in_place(next.data());
    next /= std::sqrt(next.squaredNorm() * dq);
    const double change = std::sqrt((next - psi).squaredNorm() * dq);
    psi = std::move(next);
    if (change < opts.tolerance) {
      if (psi(n / 2) < 0.0) psi = -psi;
      return psi.cast<Complex>();
    }
  }
  throw std::runtime_error("ground_state: imaginary-time relaxation did not "
                           "converge");
}

BoundaryFactors BoundaryFactors::vacuum(const QMGrid& grid) {
  CVector psi = ground_state(grid);
  return BoundaryFactors{psi, psi};
}

CMatrix propagate_driven(const CMatrix& states, const QMGrid& grid,
                         const DriveSeries& drive, double T0, double T) {
  grid.validate();
  if (states.rows() != grid.n_points) {
    throw ContractError("state size does not match the grid");
  }
  if (T < T0) throw ContractError("propagate_driven requires T >= T0");
  if (grid.dt > 0.01 / grid.omega) {
    throw ContractError("time step must satisfy dt <= 0.01 / omega");
  }
  const bool driven = !drive.empty() && !drive.identically_zero();
  if (driven) {
    if (grid.dt > drive.dt * (1.0 + 1e-12)) {
      throw ContractError("time step coarser than the drive sampling");
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(T));
    if (drive.t0 > T0 + tol || drive.t1() < T - tol) {
      throw ContractError("drive does not cover [T0, T]");
    }
  }
  if (T == T0 || states.cols() == 0) return states;

  const auto steps = static_cast<long>(std::ceil((T - T0) / grid.dt - 1e-9));
  const double dt = (T - T0) / static_cast<double>(steps);
  const int n = grid.n_points;
  const auto q = grid.positions();

  // M(+-) = 1 +- i dt/(2h) (H - h j1 q)
  const BandMatrix<double> h = oscillator_hamiltonian(grid);
  const Complex half_step = kI * (0.5 * dt / grid.hbar);
  BandMatrix<Complex> implicit = h.scaled(half_step, Complex(1.0));
  BandMatrix<Complex> explicit_ = h.scaled(-half_step, Complex(1.0));
  const BandMatrix<Complex> base_implicit = implicit;
  const BandMatrix<Complex> base_explicit = explicit_;
  if (!driven) implicit.factor();

  CMatrix psi = states;
  CVector rhs(n);
  for (long s = 0; s < steps; ++s) {
    if (driven) {
      const double j = drive.at(T0 + (static_cast<double>(s) + 0.5) * dt);
      const Complex shift = -kI * (0.5 * dt * j);
      implicit = base_implicit;
      explicit_ = base_explicit;
      for (int i = 0; i < n; ++i) {
        const double qi = q[static_cast<std::size_t>(i)];
        implicit.at(i, i) += shift * qi;
        explicit_.at(i, i) -= shift * qi;
      }
      implicit.factor();
    }
    for (Eigen::Index c = 0; c < psi.cols(); ++c) {
      Complex* column = psi.col(c).data();
      explicit_.multiply(column, rhs.data());
      implicit.solve_in_place(rhs.data());
      psi.col(c) = rhs;
    }
  }
  check_edges(psi);
  return psi;
}

CVector propagate_driven(const CVector& state, const QMGrid& grid,
                         const DriveSeries& drive, double T0, double T) {
  CMatrix m = state;
  return propagate_driven(m, grid, drive, T0, T).col(0);
}

CMatrix relation5_lhs(const QMGrid& grid, const DriveSeries& drive, double T0,
                      double T, std::span<const double> p0_grid,
                      std::span<const double> p_grid,
                      const BoundaryFactors& boundary) {
  grid.validate();
  check_band(grid, p0_grid);
  check_band(grid, p_grid);
  const auto rows = static_cast<Eigen::Index>(p_grid.size());
  const auto cols = static_cast<Eigen::Index>(p0_grid.size());
  if (rows == 0 || cols == 0) return CMatrix(rows, cols);

  const int n = grid.n_points;
  const double dq = grid.spacing();
  const auto q = grid.positions();

  CMatrix initial(n, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double p0 = p0_grid[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const double qi = q[static_cast<std::size_t>(i)];
      initial(i, j) = boundary.left(i) * std::exp(-kI * (p0 * qi));
    }
  }
  const CMatrix evolved = propagate_driven(initial, grid, drive, T0, T);

  CMatrix transform(rows, n);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double p = p_grid[static_cast<std::size_t>(r)];
    for (int i = 0; i < n; ++i) {
      const double qi = q[static_cast<std::size_t>(i)];
      transform(r, i) = std::exp(kI * (p * qi)) * boundary.right(i) * dq;
    }
  }
  return transform * evolved;
}

CMatrix relation5_lhs(const QMGrid& grid, const DriveSeries& drive, double T0,
                      double T, std::span<const double> p0_grid,
                      std::span<const double> p_grid) {
  if (p0_grid.empty() || p_grid.empty()) {
    return CMatrix(static_cast<Eigen::Index>(p_grid.size()),
                   static_cast<Eigen::Index>(p0_grid.size()));
  }
  return relation5_lhs(grid, drive, T0, T, p0_grid, p_grid,
                       BoundaryFactors::vacuum(grid));
}

Relation5Source::Relation5Source(const DriveSeries& drive, double T0, double T,
                                 double omega, double hbar)
    : hbar_(hbar),
      same_time_(feynman_kernel_closed(omega, 0.0)),
      across_(feynman_kernel_closed(omega, T - T0)) {
  if (!(hbar > 0.0)) throw ContractError("hbar must be positive");
  if (T < T0) throw ContractError("relation5 requires T >= T0");
  if (drive.empty() || drive.identically_zero()) return;
  if (!spans(drive, T0, T)) {
    throw ContractError("drive samples must span [T0, T] exactly");
  }
  const std::vector<Complex> f(drive.values.begin(), drive.values.end());
  drive_at_T_ = kernel_against_samples(omega, T, drive.t0, drive.dt, f);
  drive_at_T0_ = kernel_against_samples(omega, T0, drive.t0, drive.dt, f);
  drive_drive_ = kernel_double_integral(omega, drive.dt, f, f);
}

Complex Relation5Source::log_value(double p0, double p) const {
  const Complex quadratic = (p * p + p0 * p0) * same_time_ -
                            2.0 * p * p0 * across_ + 2.0 * p * drive_at_T_ -
                            2.0 * p0 * drive_at_T0_ + drive_drive_;
  return -kI / (2.0 * hbar_) * quadratic;
}

Complex Relation5Source::operator()(double p0, double p) const {
  return std::exp(log_value(p0, p));
}

Complex relation5_rhs(double p0, double p, const DriveSeries& drive, double T0,
                      double T, double omega, double hbar) {
  return Relation5Source(drive, T0, T, omega, hbar)(p0, p);
}

CMatrix relation5_rhs_matrix(std::span<const double> p0_grid,
                             std::span<const double> p_grid,
                             const DriveSeries& drive, double T0, double T,
                             double omega, double hbar) {
  const Relation5Source source(drive, T0, T, omega, hbar);
  CMatrix out(static_cast<Eigen::Index>(p_grid.size()),
              static_cast<Eigen::Index>(p0_grid.size()));
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      out(r, c) = source(p0_grid[static_cast<std::size_t>(c)],
                         p_grid[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

ResidualReport compare_relation5(const CMatrix& lhs, const CMatrix& rhs,
                                 double tolerance, double exclusion) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    throw ContractError("relation5 matrices differ in shape");
  }
  ResidualReport r;
  r.identity = "relation5_ratio";
  r.parameters = {{"rows", static_cast<double>(lhs.rows())},
                  {"cols", static_cast<double>(lhs.cols())},
                  {"exclusion", exclusion}};

  std::vector<Complex> ratios;
  for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
    for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
      if (std::abs(lhs(i, j)) < exclusion) continue;
      ratios.push_back(lhs(i, j) / rhs(i, j));
    }
  }
  r.metrics.push_back({"included_entries", static_cast<double>(ratios.size()),
                       std::nullopt});
  if (ratios.empty()) {
    r.verdict = Verdict::kInconclusive;
    return r;
  }
  Complex mean{};
  for (const auto& x : ratios) mean += x;
  mean /= static_cast<double>(ratios.size());
  double var = 0.0;
  for (const auto& x : ratios) var += std::norm(x - mean);
  var /= static_cast<double>(ratios.size());
  r.metrics.push_back({"ratio_spread", std::sqrt(var) / std::abs(mean), tolerance});
  r.reported_constant = {"mean_ratio", mean};
  r.finalize();
  return r;
}

Complex cross_term_kernel(std::span<const Complex, 4> values, double p0,
                          double p, double hbar) {
  if (p == 0.0 || p0 == 0.0) {
    throw ContractError("cross-term extraction needs nonzero p and p0");
  }
  const Complex ratio = values[0] * values[3] / (values[1] * values[2]);
  return std::log(ratio) / (kI * p * p0 / hbar);
}

Complex measured_cross_kernel(const QMGrid& grid, double T0, double T,
                              double p0, double p) {
  const std::array<double, 2> p0s{p0, 0.0};
  const std::array<double, 2> ps{p, 0.0};
  const CMatrix m = relation5_lhs(grid, DriveSeries{}, T0, T, p0s, ps);
  const std::array<Complex, 4> values{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
  return cross_term_kernel(values, p0, p, grid.hbar);
}

}  // namespace pseudodyn
