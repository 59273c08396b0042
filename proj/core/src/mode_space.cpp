#include "pseudodyn/mode_space.hpp"

#include <cmath>
#include <numbers>

namespace pseudodyn {

ModeSpace ModeSpace::build(int num_modes, double box_length, double mass,
                           double hbar) {
  if (num_modes < 2 || num_modes % 2 != 0) {
    throw ContractError("num_modes must be a positive even integer, got " +
                        std::to_string(num_modes));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ContractError("box_length must be positive");
  }
  // m = 0 leaves an omega = 0 zero mode, singular in every 1/omega kernel.
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ContractError("mass must be strictly positive");
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw ContractError("hbar must be positive");
  }

  ModeSpace ms;
  ms.num_modes_ = num_modes;
  ms.box_length_ = box_length;
  ms.mass_ = mass;
  ms.hbar_ = hbar;

  const auto n = static_cast<std::size_t>(num_modes);
  ms.momenta_.resize(n);
  ms.frequencies_.resize(n);
  ms.partners_.resize(n);
  const double dp = 2.0 * std::numbers::pi / box_length;
  for (std::size_t i = 0; i < n; ++i) {
    const int k = ms.mode_of(i);
    const double p = dp * k;
    ms.momenta_[i] = p;
    ms.frequencies_[i] = std::sqrt(p * p + mass * mass);
    int partner = -k;
    if (!ms.contains(partner)) partner += num_modes;  // -N/2 aliases N/2
    ms.partners_[i] = ms.index_of(partner);
  }
  // Bit-identical omega for k and -k; the formula above already is, but the
  // pairing identities downstream compare coefficients with ==.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = ms.partners_[i];
    if (j < i) ms.frequencies_[i] = ms.frequencies_[j];
  }
  return ms;
}

std::size_t ModeSpace::index_of(int k) const {
  if (!contains(k)) {
    throw ContractError("mode index " + std::to_string(k) + " out of range");
  }
  return static_cast<std::size_t>(k - k_min());
}

int ModeSpace::mode_of(std::size_t index) const {
  if (index >= size()) throw ContractError("storage index out of range");
  return static_cast<int>(index) + k_min();
}

double ModeSpace::momentum(int k) const { return momenta_[index_of(k)]; }

double ModeSpace::frequency(int k) const { return frequencies_[index_of(k)]; }

double mode_frequency(const ModeSpace& ms, int k) { return ms.frequency(k); }

ModeVector ModeVector::zeros(const ModeSpace& ms) {
  ModeVector v;
  v.values_.assign(ms.size(), Complex{});
  v.real_ = true;
  return v;
}

ModeVector ModeVector::from_values(const ModeSpace& ms,
                                   std::vector<Complex> values) {
  if (values.size() != ms.size()) {
    throw ContractError("ModeVector size does not match the mode space");
  }
  ModeVector v;
  v.values_ = std::move(values);
  v.real_ = false;
  return v;
}

ModeVector ModeVector::real_field(const ModeSpace& ms,
                                  std::vector<Complex> values) {
  ModeVector v = from_values(ms, std::move(values));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.values_[ms.partner(i)] != std::conj(v.values_[i])) {
      throw ContractError("amplitude(-k) != conj(amplitude(k)) at k = " +
                          std::to_string(ms.mode_of(i)));
    }
  }
  v.real_ = true;
  return v;
}

ModeVector ModeVector::real_from_nonnegative(const ModeSpace& ms,
                                             std::span<const Complex> values) {
  const auto expected = static_cast<std::size_t>(ms.k_max() + 1);
  if (values.size() != expected) {
    throw ContractError("expected amplitudes for k = 0..N/2");
  }
  std::vector<Complex> full(ms.size());
  for (int k = 0; k <= ms.k_max(); ++k) {
    const Complex a = values[static_cast<std::size_t>(k)];
    const std::size_t i = ms.index_of(k);
    if (ms.self_partnered(i) && a.imag() != 0.0) {
      throw ContractError("self-partnered mode k = " + std::to_string(k) +
                          " needs a real amplitude");
    }
    full[i] = a;
    full[ms.partner(i)] = std::conj(a);
  }
  return real_field(ms, std::move(full));
}

ModeVector ModeVector::basis(const ModeSpace& ms, int k) {
  ModeVector v = zeros(ms);
  const std::size_t i = ms.index_of(k);
  v.values_[i] = 1.0;
  v.values_[ms.partner(i)] = 1.0;
  return v;
}

ModeVector ModeVector::scaled(Complex factor) const {
  ModeVector out = *this;
  for (auto& a : out.values_) a *= factor;
  // A complex factor breaks the conjugation pairing.
  out.real_ = real_ && factor.imag() == 0.0;
  return out;
}

}  // namespace pseudodyn
