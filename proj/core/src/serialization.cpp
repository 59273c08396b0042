#include "pseudodyn/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pseudodyn {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? ""
                                             : cell.substr(first, last - first + 1));
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw FormatError("line " + std::to_string(line) + ": '" + s +
                      "' is not a number");
  }
  return v;
}

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

// Reads rows, skipping comments and a header whose first cell is `first`.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    std::istream& in, std::size_t columns, const std::string& first) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (skippable(line)) continue;
    auto cells = split_csv(line);
    if (rows.empty() && !cells.empty() && cells[0] == first) continue;
    if (cells.size() != columns) {
      throw FormatError("line " + std::to_string(number) + ": expected " +
                        std::to_string(columns) + " columns, found " +
                        std::to_string(cells.size()));
    }
    rows.emplace_back(number, std::move(cells));
  }
  if (rows.empty()) throw FormatError("no data rows");
  return rows;
}

double uniform_step(const std::vector<double>& times) {
  if (times.size() < 2) throw FormatError("need at least two time samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw FormatError("times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double expected = times[0] + dt * static_cast<double>(i);
    if (std::abs(times[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw FormatError("time grid is not uniform at t = " +
                        format_double(times[i]));
    }
  }
  return dt;
}

void write_metric_cells(std::ostream& out, const ResidualReport& r,
                        std::span<const char* const> names) {
  for (const char* name : names) {
    const auto it = std::find_if(r.metrics.begin(), r.metrics.end(),
                                 [&](const Metric& m) { return m.name == name; });
    out << ',' << (it == r.metrics.end() ? std::string() : format_double(it->value));
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) {
    throw FormatError("complex value must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const ModeSpace& ms) {
  return Json{{"num_modes", ms.num_modes()},
              {"box_length", ms.box_length()},
              {"mass", ms.mass()},
              {"hbar", ms.hbar()}};
}

ModeSpace mode_space_from_json(const Json& j) {
  ModeSpace::Params p;
  p.num_modes = j.value("num_modes", p.num_modes);
  p.box_length = j.value("box_length", p.box_length);
  p.mass = j.value("mass", p.mass);
  p.hbar = j.value("hbar", p.hbar);
  return ModeSpace::build(p);
}

Json to_json(const GaussianCoefficients& g) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < g.A().rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < g.A().cols(); ++k) {
      row.push_back(complex_to_json(g.A()(i, k)));
    }
    a.push_back(std::move(row));
  }
  Json b = Json::array();
  for (Eigen::Index i = 0; i < g.b().size(); ++i) {
    b.push_back(complex_to_json(g.b()(i)));
  }
  return Json{{"A", std::move(a)}, {"b", std::move(b)}, {"c", complex_to_json(g.c())}};
}

GaussianCoefficients gaussian_from_json(const Json& j) {
  const Json& a = j.at("A");
  const Json& b = j.at("b");
  const auto n = static_cast<Eigen::Index>(b.size());
  if (static_cast<Eigen::Index>(a.size()) != n) {
    throw FormatError("A and b sizes differ");
  }
  CMatrix am(n, n);
  CVector bv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = a[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw FormatError("A is not square");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      am(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
    }
    bv(i) = complex_from_json(b[static_cast<std::size_t>(i)]);
  }
  return GaussianCoefficients(std::move(am), std::move(bv),
                              complex_from_json(j.at("c")));
}

Json to_json(const ConventionCalibration& c) {
  return Json{{"lambda", complex_to_json(c.lambda)},
              {"sigma", c.sigma},
              {"c1", complex_to_json(c.c1)},
              {"c2", complex_to_json(c.c2)},
              {"canonical", c.canonical()},
              {"first_order_residual", c.first_order_residual},
              {"second_order",
               {{"found", c.second_order.found},
                {"curvature_sign", c.second_order.curvature_sign},
                {"source_phase_sq", c.second_order.source_phase_sq}}}};
}

Json to_json(const EvolutionState& st) {
  Json v = Json::array();
  for (const auto& x : st.v_hat.values()) v.push_back(complex_to_json(x));
  return Json{{"mode_space", to_json(st.ms)},
              {"T", st.T},
              {"v_hat", std::move(v)},
              {"coefficients", to_json(st.g)},
              {"calibration", to_json(st.calib)}};
}

Json to_json(const SourceSpec& s) {
  auto vec = [](const ModeVector& m) {
    Json out = Json::array();
    for (const auto& x : m.values()) out.push_back(complex_to_json(x));
    return out;
  };
  Json j{{"T", s.T}, {"T0", s.T0}, {"u_hat", vec(s.u_hat)}, {"v_hat", vec(s.v_hat)}};
  if (s.drive) {
    Json samples = Json::array();
    for (const auto& m : s.drive->samples) samples.push_back(vec(m));
    j["drive"] = Json{{"dt", s.drive->dt}, {"samples", std::move(samples)}};
  } else {
    j["drive"] = nullptr;
  }
  return j;
}

Json to_json(const ResidualReport& r) {
  Json params = Json::object();
  for (const auto& [name, value] : r.parameters) params[name] = value;
  Json metrics = Json::array();
  for (const auto& m : r.metrics) {
    Json entry{{"name", m.name}, {"value", m.value}};
    entry["tolerance"] = m.tolerance ? Json(*m.tolerance) : Json(nullptr);
    entry["pass"] = m.pass();
    metrics.push_back(std::move(entry));
  }
  Json j{{"identity", r.identity},
         {"parameters", std::move(params)},
         {"metrics", std::move(metrics)},
         {"seed", r.seed},
         {"verdict", to_string(r.verdict)}};
  if (r.reported_constant) {
    j["reported_constant"] = {{"name", r.reported_constant->first},
                              {"value", complex_to_json(r.reported_constant->second)}};
  }
  return j;
}

Json to_json(const QuadratureResult& q) {
  return Json{{"value", complex_to_json(q.value)},
              {"truncation_estimate", q.truncation_estimate},
              {"evaluations", q.evaluations}};
}

DriveSamples read_field_drive_csv(std::istream& in, const ModeSpace& ms) {
  const auto rows = read_rows(in, 4, "t");
  std::map<double, std::vector<std::optional<Complex>>> by_time;
  for (const auto& [line, cells] : rows) {
    const double t = parse_number(cells[0], line);
    const double index = parse_number(cells[1], line);
    if (index < 0 || index >= static_cast<double>(ms.size()) ||
        index != std::floor(index)) {
      throw FormatError("line " + std::to_string(line) + ": mode_index " +
                        cells[1] + " outside [0, " + std::to_string(ms.size()) + ")");
    }
    auto& slot = by_time.try_emplace(t, ms.size()).first->second;
    auto& entry = slot[static_cast<std::size_t>(index)];
    if (entry) {
      throw FormatError("line " + std::to_string(line) + ": duplicate sample");
    }
    entry = Complex(parse_number(cells[2], line), parse_number(cells[3], line));
  }
  std::vector<double> times;
  DriveSamples out;
  for (const auto& [t, slot] : by_time) {
    times.push_back(t);
    std::vector<Complex> values;
    for (std::size_t k = 0; k < slot.size(); ++k) {
      if (!slot[k]) {
        throw FormatError("t = " + format_double(t) + ": mode_index " +
                          std::to_string(k) + " missing");
      }
      values.push_back(*slot[k]);
    }
    out.samples.push_back(ModeVector::from_values(ms, std::move(values)));
  }
  out.dt = uniform_step(times);
  return out;
}

DriveSeries read_qm_drive_csv(std::istream& in) {
  const auto rows = read_rows(in, 2, "t");
  std::vector<double> times;
  DriveSeries out;
  for (const auto& [line, cells] : rows) {
    times.push_back(parse_number(cells[0], line));
    out.values.push_back(parse_number(cells[1], line));
  }
  out.t0 = times.front();
  out.dt = uniform_step(times);
  return out;
}

void write_relation5_csv(std::ostream& out, std::span<const double> p0_grid,
                         std::span<const double> p_grid, const CMatrix& lhs,
                         const CMatrix& rhs) {
  const auto rows = static_cast<Eigen::Index>(p_grid.size());
  const auto cols = static_cast<Eigen::Index>(p0_grid.size());
  if (lhs.rows() != rows || lhs.cols() != cols || rhs.rows() != rows ||
      rhs.cols() != cols) {
    throw ContractError("relation5 matrices do not match the momentum grids");
  }
  out << "p0,p,re_lhs,im_lhs,re_rhs,im_rhs,ratio_re,ratio_im\n";
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Complex ratio = lhs(i, j) / rhs(i, j);
      out << format_double(p0_grid[static_cast<std::size_t>(j)]) << ','
          << format_double(p_grid[static_cast<std::size_t>(i)]) << ','
          << format_double(lhs(i, j).real()) << ',' << format_double(lhs(i, j).imag())
          << ',' << format_double(rhs(i, j).real()) << ','
          << format_double(rhs(i, j).imag()) << ',' << format_double(ratio.real())
          << ',' << format_double(ratio.imag()) << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::string& header,
                     std::span<const SweepRow> rows) {
  static constexpr const char* kEq14[] = {"q2_residual", "q1_residual",
                                          "fd_residual"};
  static constexpr const char* kEq13[] = {"q2_residual", "q1_residual",
                                          "u_spread", "fd_residual"};
  std::string first = header;
  std::replace(first.begin(), first.end(), '\n', ' ');
  out << "# " << first << '\n';
  out << "N,m,L,h,T,eq14_q2,eq14_q1,eq14_fd,eq14_verdict,eq13_q2,eq13_q1,"
         "eq13_u_spread,eq13_fd,g_re,g_im,eq13_verdict,seed\n";
  for (const auto& r : rows) {
    out << r.num_modes << ',' << format_double(r.mass) << ','
        << format_double(r.box_length) << ',' << format_double(r.hbar) << ','
        << format_double(r.T);
    write_metric_cells(out, r.eq14, kEq14);
    out << ',' << to_string(r.eq14.verdict);
    write_metric_cells(out, r.eq13, kEq13);
    const Complex g = r.eq13.reported_constant ? r.eq13.reported_constant->second
                                               : Complex{};
    out << ',' << format_double(g.real()) << ',' << format_double(g.imag()) << ','
        << to_string(r.eq13.verdict) << ',' << r.eq14.seed << '\n';
  }
}

}  // namespace pseudodyn
