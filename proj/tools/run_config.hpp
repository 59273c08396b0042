#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pseudodyn/mode_space.hpp"
#include "pseudodyn/qm_oracle.hpp"
#include "pseudodyn/serialization.hpp"
#include "pseudodyn/verifier.hpp"

namespace pseudodyn::cli {

/// Invalid configuration; the message names the field or file line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VHatSpec {
  enum class Preset { kZero, kOnes, kSingle, kRandom };
  Preset preset = Preset::kRandom;
  int k = 1;                     // kSingle
  std::uint64_t seed = 1;        // kRandom
};

struct SweepSpec {
  std::vector<int> modes{2, 8, 16, 64};
  std::vector<double> masses{0.5, 1.0, 2.0};
  std::vector<double> times{0.1, 1.0, 10.0};
};

struct RunConfig {
  std::string subcommand;
  ModeSpace::Params mode_space;
  std::vector<double> times{1.0};
  VHatSpec v_hat;
  QMGrid qm_grid;
  std::optional<std::string> drive_file;
  Tolerances tol;
  double relation5_static_tol = 1e-3;
  double relation5_tol = 1e-2;
  int semigroup_partitions = 10;
  SweepSpec sweep;
  std::string out = "pseudodyn-out";
  std::uint64_t seed = 20261016;
};

/// Reads a JSON config file; syntax errors report line and column.
Json load_config_file(const std::string& path);

/// Overlays the keys present in `j` onto `cfg`. Unknown keys and wrong
/// types raise ConfigError naming the field.
void apply_json(RunConfig& cfg, const Json& j);

/// Range checks every field; throws ConfigError on the first violation.
void validate(const RunConfig& cfg);

ModeVector make_v_hat(const ModeSpace& ms, const VHatSpec& spec);

Json to_json(const RunConfig& cfg);

}  // namespace pseudodyn::cli
