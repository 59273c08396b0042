#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pseudodyn::cli {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void check_keys(const Json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) field_error(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      field_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

template <typename T>
T read_as(const Json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    field_error(field, std::string("wrong type (") + e.what() + ")");
  }
}

template <typename T>
void read_into(const Json& j, const char* key, const std::string& prefix, T& out) {
  if (j.contains(key)) out = read_as<T>(j.at(key), prefix + key);
}

void positive(double x, const std::string& field) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    field_error(field, "must be positive and finite, got " + format_double(x));
  }
}

std::pair<int, int> line_and_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const char* preset_name(VHatSpec::Preset p) {
  switch (p) {
    case VHatSpec::Preset::kZero: return "zero";
    case VHatSpec::Preset::kOnes: return "ones";
    case VHatSpec::Preset::kSingle: return "single";
    case VHatSpec::Preset::kRandom: return "random";
  }
  return "random";
}

}  // namespace

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": " + e.what());
  }
}

void apply_json(RunConfig& cfg, const Json& j) {
  check_keys(j, "",
             {"modes", "mass", "box_length", "hbar", "times", "v_hat", "qm_grid",
              "drive_file", "tolerances", "semigroup_partitions", "sweep", "out",
              "seed"});
  read_into(j, "modes", "", cfg.mode_space.num_modes);
  read_into(j, "mass", "", cfg.mode_space.mass);
  read_into(j, "box_length", "", cfg.mode_space.box_length);
  read_into(j, "hbar", "", cfg.mode_space.hbar);
  read_into(j, "times", "", cfg.times);
  read_into(j, "semigroup_partitions", "", cfg.semigroup_partitions);
  read_into(j, "out", "", cfg.out);
  read_into(j, "seed", "", cfg.seed);
  if (j.contains("drive_file")) {
    if (j.at("drive_file").is_null()) cfg.drive_file.reset();
    else cfg.drive_file = read_as<std::string>(j.at("drive_file"), "drive_file");
  }

  if (j.contains("v_hat")) {
    const Json& v = j.at("v_hat");
    check_keys(v, "v_hat", {"preset", "k", "seed"});
    if (v.contains("preset")) {
      const auto name = read_as<std::string>(v.at("preset"), "v_hat.preset");
      if (name == "zero") cfg.v_hat.preset = VHatSpec::Preset::kZero;
      else if (name == "ones") cfg.v_hat.preset = VHatSpec::Preset::kOnes;
      else if (name == "single") cfg.v_hat.preset = VHatSpec::Preset::kSingle;
      else if (name == "random") cfg.v_hat.preset = VHatSpec::Preset::kRandom;
      else field_error("v_hat.preset", "expected zero, ones, single or random");
    }
    read_into(v, "k", "v_hat.", cfg.v_hat.k);
    read_into(v, "seed", "v_hat.", cfg.v_hat.seed);
  }

  if (j.contains("qm_grid")) {
    const Json& g = j.at("qm_grid");
    check_keys(g, "qm_grid", {"q_min", "q_max", "n_points", "dt", "omega"});
    read_into(g, "q_min", "qm_grid.", cfg.qm_grid.q_min);
    read_into(g, "q_max", "qm_grid.", cfg.qm_grid.q_max);
    read_into(g, "n_points", "qm_grid.", cfg.qm_grid.n_points);
    read_into(g, "dt", "qm_grid.", cfg.qm_grid.dt);
    read_into(g, "omega", "qm_grid.", cfg.qm_grid.omega);
  }

  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    check_keys(t, "tolerances",
               {"coefficient", "second_order", "numeric", "spread",
                "relation5_static", "relation5"});
    read_into(t, "coefficient", "tolerances.", cfg.tol.coefficient);
    read_into(t, "second_order", "tolerances.", cfg.tol.second_order);
    read_into(t, "numeric", "tolerances.", cfg.tol.numeric);
    read_into(t, "spread", "tolerances.", cfg.tol.spread);
    read_into(t, "relation5_static", "tolerances.", cfg.relation5_static_tol);
    read_into(t, "relation5", "tolerances.", cfg.relation5_tol);
  }

  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    check_keys(s, "sweep", {"modes", "masses", "times"});
    read_into(s, "modes", "sweep.", cfg.sweep.modes);
    read_into(s, "masses", "sweep.", cfg.sweep.masses);
    read_into(s, "times", "sweep.", cfg.sweep.times);
  }
}

void validate(const RunConfig& cfg) {
  const auto& m = cfg.mode_space;
  if (m.num_modes < 2 || m.num_modes % 2 != 0) {
    field_error("modes", "must be an even integer >= 2, got " +
                             std::to_string(m.num_modes));
  }
  positive(m.mass, "mass");
  positive(m.box_length, "box_length");
  positive(m.hbar, "hbar");
  if (cfg.times.empty()) field_error("times", "must not be empty");
  for (double t : cfg.times) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      field_error("times", "entries must be finite and >= 0, got " + format_double(t));
    }
  }
  if (cfg.v_hat.preset == VHatSpec::Preset::kSingle &&
      (cfg.v_hat.k < -m.num_modes / 2 + 1 || cfg.v_hat.k > m.num_modes / 2)) {
    field_error("v_hat.k", "mode " + std::to_string(cfg.v_hat.k) +
                               " outside the lattice");
  }

  const auto& g = cfg.qm_grid;
  if (!(g.q_max > g.q_min)) field_error("qm_grid.q_max", "must exceed qm_grid.q_min");
  if (g.n_points < 256) field_error("qm_grid.n_points", "must be >= 256");
  positive(g.dt, "qm_grid.dt");
  positive(g.omega, "qm_grid.omega");

  positive(cfg.tol.coefficient, "tolerances.coefficient");
  positive(cfg.tol.second_order, "tolerances.second_order");
  positive(cfg.tol.numeric, "tolerances.numeric");
  positive(cfg.tol.spread, "tolerances.spread");
  positive(cfg.relation5_static_tol, "tolerances.relation5_static");
  positive(cfg.relation5_tol, "tolerances.relation5");

  if (cfg.semigroup_partitions < 1) {
    field_error("semigroup_partitions", "must be >= 1");
  }
  if (cfg.sweep.modes.empty() || cfg.sweep.masses.empty() || cfg.sweep.times.empty()) {
    field_error("sweep", "modes, masses and times must be non-empty");
  }
  for (int n : cfg.sweep.modes) {
    if (n < 2 || n % 2 != 0) field_error("sweep.modes", "entries must be even and >= 2");
  }
  for (double x : cfg.sweep.masses) positive(x, "sweep.masses");
  for (double t : cfg.sweep.times) positive(t, "sweep.times");
  if (cfg.out.empty()) field_error("out", "must not be empty");
}

ModeVector make_v_hat(const ModeSpace& ms, const VHatSpec& spec) {
  switch (spec.preset) {
    case VHatSpec::Preset::kZero:
      return ModeVector::zeros(ms);
    case VHatSpec::Preset::kSingle:
      return ModeVector::basis(ms, spec.k);
    case VHatSpec::Preset::kOnes: {
      std::vector<Complex> ones(static_cast<std::size_t>(ms.k_max() + 1), 1.0);
      return ModeVector::real_from_nonnegative(ms, ones);
    }
    case VHatSpec::Preset::kRandom:
      break;
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<Complex> values(static_cast<std::size_t>(ms.k_max() + 1));
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double re = uniform(rng);
    const double im = uniform(rng);
    const bool self = k == 0 || static_cast<int>(k) == ms.k_max();
    values[k] = Complex(re, self ? 0.0 : im);
  }
  return ModeVector::real_from_nonnegative(ms, values);
}

Json to_json(const RunConfig& cfg) {
  Json j{{"subcommand", cfg.subcommand},
         {"modes", cfg.mode_space.num_modes},
         {"mass", cfg.mode_space.mass},
         {"box_length", cfg.mode_space.box_length},
         {"hbar", cfg.mode_space.hbar},
         {"times", cfg.times},
         {"v_hat", {{"preset", preset_name(cfg.v_hat.preset)},
                    {"k", cfg.v_hat.k},
                    {"seed", cfg.v_hat.seed}}},
         {"qm_grid", {{"q_min", cfg.qm_grid.q_min},
                      {"q_max", cfg.qm_grid.q_max},
                      {"n_points", cfg.qm_grid.n_points},
                      {"dt", cfg.qm_grid.dt},
                      {"omega", cfg.qm_grid.omega}}},
         {"tolerances", {{"coefficient", cfg.tol.coefficient},
                         {"second_order", cfg.tol.second_order},
                         {"numeric", cfg.tol.numeric},
                         {"spread", cfg.tol.spread},
                         {"relation5_static", cfg.relation5_static_tol},
                         {"relation5", cfg.relation5_tol}}},
         {"semigroup_partitions", cfg.semigroup_partitions},
         {"sweep", {{"modes", cfg.sweep.modes},
                    {"masses", cfg.sweep.masses},
                    {"times", cfg.sweep.times}}},
         {"out", cfg.out},
         {"seed", cfg.seed}};
  j["drive_file"] = cfg.drive_file ? Json(*cfg.drive_file) : Json(nullptr);
  return j;
}

}  // namespace pseudodyn::cli
