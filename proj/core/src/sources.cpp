#include "pseudodyn/sources.hpp"

#include <cmath>

namespace pseudodyn {

namespace {

constexpr Complex kI{0.0, 1.0};

double trapezoid_weight(std::size_t i, std::size_t n, double dt) {
  return (i == 0 || i + 1 == n) ? 0.5 * dt : dt;
}

void require_sized(const ModeSpace& ms, const ModeVector& v, const char* what) {
  if (v.size() != ms.size()) {
    throw ContractError(std::string(what) + " is not sized to the mode space");
  }
}

}  // namespace

SourceSpec delta_pair_source(const ModeSpace& ms, const ModeVector& u_hat,
                             const ModeVector& v_hat, double T, double T0) {
  if (T0 > T) throw ContractError("source requires T0 <= T");
  require_sized(ms, u_hat, "u_hat");
  require_sized(ms, v_hat, "v_hat");
  return SourceSpec{T, T0, u_hat, v_hat, std::nullopt};
}

SourceSpec add_smooth_drive(SourceSpec s, std::vector<ModeVector> samples,
                            double dt) {
  if (!(dt > 0.0)) throw ContractError("drive step must be positive");
  if (samples.size() < 2) {
    throw ContractError("drive needs at least two samples");
  }
  const double span = dt * static_cast<double>(samples.size() - 1);
  const double target = s.T - s.T0;
  if (std::abs(span - target) > 1e-9 * std::max(1.0, std::abs(target))) {
    throw ContractError("drive samples do not span [T0, T]");
  }
  for (const auto& m : samples) {
    if (m.size() != s.u_hat.size()) {
      throw ContractError("drive sample is not sized to the mode space");
    }
  }
  s.drive = DriveSamples{dt, std::move(samples)};
  return s;
}

Complex delta_layers_transform(const SourceSpec& s, std::size_t index,
                               double energy, const KernelConvention& conv) {
  const double sg = conv.sigma;
  const Complex at_t = std::exp(kI * (sg * energy * s.T));
  const Complex at_t0 = std::exp(kI * (sg * energy * s.T0));
  return s.u_hat[index] * at_t - s.v_hat[index] * at_t0;
}

Complex kernel_against_samples(double omega, double t_eval, double t_start,
                               double dt, std::span<const Complex> f,
                               const KernelConvention& conv) {
  Complex sum{};
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_start + dt * static_cast<double>(i);
    sum += trapezoid_weight(i, n, dt) * f[i] *
           feynman_kernel_closed(omega, t_eval - t, conv);
  }
  return sum;
}

Complex kernel_double_integral(double omega, double dt,
                               std::span<const Complex> f,
                               std::span<const Complex> g,
                               const KernelConvention& conv) {
  if (f.size() != g.size()) {
    throw ContractError("double integral needs equally sampled drives");
  }
  const std::size_t n = f.size();
  // Uniform grid: the kernel depends on |i - j| only.
  std::vector<Complex> table(n);
  for (std::size_t d = 0; d < n; ++d) {
    table[d] = feynman_kernel_closed(omega, dt * static_cast<double>(d), conv);
  }
  Complex sum{};
  for (std::size_t i = 0; i < n; ++i) {
    Complex row{};
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      row += trapezoid_weight(j, n, dt) * g[j] * table[d];
    }
    sum += trapezoid_weight(i, n, dt) * f[i] * row;
  }
  return sum;
}

Complex ZExponent::log_value(const ModeVector& u_hat,
                             const ModeVector& v_hat) const {
  if (u_hat.size() != uu.size() || v_hat.size() != uu.size()) {
    throw ContractError("layer amplitudes are not sized to the exponent");
  }
  Complex sum = drive_constant;
  for (std::size_t k = 0; k < uu.size(); ++k) {
    const std::size_t p = partner[k];
    sum += uu[k] * u_hat[k] * u_hat[p] + 2.0 * uv[k] * u_hat[k] * v_hat[p] +
           vv[k] * v_hat[k] * v_hat[p] + u_linear[k] * u_hat[k] +
           v_linear[k] * v_hat[k];
  }
  return sum;
}

ZExponent z_exponent(const ModeSpace& ms, const SourceSpec& s,
                     const KernelConvention& conv) {
  require_sized(ms, s.u_hat, "u_hat");
  require_sized(ms, s.v_hat, "v_hat");
  if (s.T0 > s.T) throw ContractError("source requires T0 <= T");

  const std::size_t n = ms.size();
  const Complex prefactor = -kI / (2.0 * ms.hbar());
  const double elapsed = s.T - s.T0;

  ZExponent z;
  z.uu.resize(n);
  z.uv.resize(n);
  z.vv.resize(n);
  z.u_linear.assign(n, Complex{});
  z.v_linear.assign(n, Complex{});
  z.partner.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double w = ms.frequencies()[k];
    z.partner[k] = ms.partner(k);
    const Complex same_time = prefactor * feynman_kernel_closed(w, 0.0, conv);
    z.uu[k] = same_time;
    z.vv[k] = same_time;
    // -v enters the source, and the two orderings u_k v_{-k}, v_k u_{-k}
    // are folded into the factor 2 of log_value.
    z.uv[k] = -prefactor * feynman_kernel_closed(w, elapsed, conv);
  }

  if (s.drive) {
    const auto& d = *s.drive;
    const std::size_t m = d.samples.size();
    std::vector<Complex> own(m);
    std::vector<Complex> mirrored(m);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = ms.frequencies()[k];
      const std::size_t p = ms.partner(k);
      for (std::size_t i = 0; i < m; ++i) {
        own[i] = d.samples[i][k];
        mirrored[i] = d.samples[i][p];
      }
      // Cross terms pick up a factor 2 from the two orderings.
      z.u_linear[k] = 2.0 * prefactor *
                      kernel_against_samples(w, s.T, s.T0, d.dt, mirrored, conv);
      z.v_linear[k] = -2.0 * prefactor *
                      kernel_against_samples(w, s.T0, s.T0, d.dt, mirrored, conv);
      z.drive_constant +=
          prefactor * kernel_double_integral(w, d.dt, own, mirrored, conv);
    }
  }
  return z;
}

Complex log_generating_functional(const ModeSpace& ms, const SourceSpec& s,
                                  const KernelConvention& conv) {
  return z_exponent(ms, s, conv).log_value(s.u_hat, s.v_hat);
}

}  // namespace pseudodyn
