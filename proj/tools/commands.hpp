#pragma once

#include <iosfwd>
#include <vector>

#include "run_config.hpp"

namespace pseudodyn::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Executes cfg.subcommand, writes reports under cfg.out and a one-line
/// summary per check to `summary`. Returns kExitPass iff every verdict
/// passes. Validation happens before anything is written.
int run(const RunConfig& cfg, std::ostream& summary);

/// The sweep's rows, computed in parallel over grid points.
std::vector<SweepRow> sweep_rows(const RunConfig& cfg);

const std::vector<std::string>& subcommands();

}  // namespace pseudodyn::cli
