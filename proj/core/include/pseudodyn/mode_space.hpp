#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudodyn {

using Complex = std::complex<double>;

/// Thrown for every violated precondition in the library.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite spatial-momentum lattice of a free scalar field in one dimension.
///
/// Mode indices run over k = -N/2+1, ..., N/2. Storage positions are
/// i = k + N/2 - 1, so position 0 holds the most negative momentum.
/// The partner of a mode is -k reduced into the index range, which makes
/// k = 0 and the unpaired k = N/2 self-partnered.
class ModeSpace {
 public:
  struct Params {
    int num_modes = 16;
    double box_length = 6.283185307179586;
    double mass = 1.0;
    double hbar = 1.0;
  };

  /// Validates and builds the lattice; throws ContractError on odd or
  /// non-positive N and on non-positive L, m or h.
  static ModeSpace build(int num_modes, double box_length, double mass,
                         double hbar);
  static ModeSpace build(const Params& p) {
    return build(p.num_modes, p.box_length, p.mass, p.hbar);
  }

  int num_modes() const { return num_modes_; }
  std::size_t size() const { return static_cast<std::size_t>(num_modes_); }
  double box_length() const { return box_length_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  Params params() const { return {num_modes_, box_length_, mass_, hbar_}; }

  int k_min() const { return -num_modes_ / 2 + 1; }
  int k_max() const { return num_modes_ / 2; }
  bool contains(int k) const { return k >= k_min() && k <= k_max(); }

  std::size_t index_of(int k) const;
  int mode_of(std::size_t index) const;
  /// Storage index of the -k partner of the mode stored at `index`.
  std::size_t partner(std::size_t index) const { return partners_[index]; }
  bool self_partnered(std::size_t index) const {
    return partners_[index] == index;
  }

  double momentum(int k) const;
  double frequency(int k) const;

  std::span<const double> momenta() const { return momenta_; }
  std::span<const double> frequencies() const { return frequencies_; }

  friend bool operator==(const ModeSpace&, const ModeSpace&) = default;

 private:
  ModeSpace() = default;

  int num_modes_ = 0;
  double box_length_ = 0.0;
  double mass_ = 0.0;
  double hbar_ = 0.0;
  std::vector<double> momenta_;
  std::vector<double> frequencies_;
  std::vector<std::size_t> partners_;
};

/// sqrt(p_k^2 + m^2). Out-of-range k throws ContractError.
double mode_frequency(const ModeSpace& ms, int k);

/// One complex amplitude per lattice mode, in ModeSpace storage order.
///
/// A vector built with `real_field` represents the transform of a real
/// function: amplitude(-k) == conj(amplitude(k)) holds exactly and
/// self-partnered modes carry real amplitudes.
class ModeVector {
 public:
  ModeVector() = default;

  static ModeVector zeros(const ModeSpace& ms);
  static ModeVector from_values(const ModeSpace& ms,
                                std::vector<Complex> values);
  /// Checks the conjugation pairing exactly; throws if it does not hold.
  static ModeVector real_field(const ModeSpace& ms,
                               std::vector<Complex> values);
  /// Builds a real-field vector from amplitudes on k = 0..N/2; negative
  /// modes are filled by conjugation. Imaginary parts on k = 0 and N/2 are
  /// rejected.
  static ModeVector real_from_nonnegative(const ModeSpace& ms,
                                          std::span<const Complex> values);
  /// Unit amplitude on modes k and -k; a real-field vector.
  static ModeVector basis(const ModeSpace& ms, int k);

  std::size_t size() const { return values_.size(); }
  bool is_real_field() const { return real_; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::span<const Complex> values() const { return values_; }

  ModeVector scaled(Complex factor) const;

  friend bool operator==(const ModeVector&, const ModeVector&) = default;

 private:
  std::vector<Complex> values_;
  bool real_ = false;
};

}  // namespace pseudodyn
