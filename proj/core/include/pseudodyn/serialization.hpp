#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "pseudodyn/gaussian.hpp"
#include "pseudodyn/mode_space.hpp"
#include "pseudodyn/pseudodynamics.hpp"
#include "pseudodyn/qm_oracle.hpp"
#include "pseudodyn/sources.hpp"
#include "pseudodyn/verifier.hpp"

namespace pseudodyn {

using Json = nlohmann::json;

/// Thrown by the readers with the offending line or field in the message.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complex numbers are written as [re, im].
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

Json to_json(const ModeSpace& ms);
ModeSpace mode_space_from_json(const Json& j);

/// {A: rows of [re, im], b: [[re, im], ...], c: [re, im]}
Json to_json(const GaussianCoefficients& g);
GaussianCoefficients gaussian_from_json(const Json& j);

Json to_json(const ConventionCalibration& c);
Json to_json(const EvolutionState& st);
Json to_json(const SourceSpec& s);
Json to_json(const ResidualReport& r);
Json to_json(const QuadratureResult& q);

/// Field drive CSV with columns t, mode_index, re, im. Rows may come in any
/// order; times must form a uniform grid and every mode must be present at
/// every time.
DriveSamples read_field_drive_csv(std::istream& in, const ModeSpace& ms);

/// Oscillator drive CSV with columns t, value on a uniform time grid.
DriveSeries read_qm_drive_csv(std::istream& in);

/// Columns p0, p, re_lhs, im_lhs, re_rhs, im_rhs, ratio_re, ratio_im;
/// lhs(i, j) belongs to p = p_grid[i], p0 = p0_grid[j].
void write_relation5_csv(std::ostream& out, std::span<const double> p0_grid,
                         std::span<const double> p_grid, const CMatrix& lhs,
                         const CMatrix& rhs);

/// One row of a residual sweep over (N, m, T).
struct SweepRow {
  int num_modes = 0;
  double mass = 0.0;
  double box_length = 0.0;
  double hbar = 0.0;
  double T = 0.0;
  ResidualReport eq14;
  ResidualReport eq13;
};

/// Writes `header` as a single leading '#' line, then a fixed-format body.
/// The body depends only on the rows.
void write_sweep_csv(std::ostream& out, const std::string& header,
                     std::span<const SweepRow> rows);

/// Shortest round-tripping decimal form of x.
std::string format_double(double x);

}  // namespace pseudodyn
