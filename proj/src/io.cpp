#include "critp/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "critp/error.hpp"

namespace critp {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::Config, what);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    config_error("value of '" + key + "' is not a number: '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    config_error("value of '" + key + "' is not an integer: '" + text + "'");
  }
  return value;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct FamilyConstants {
  Family family = Family::PowerSumSigned;
  double q = 4.0;
  double r = 4.0;
  bool r_set = false;
};

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dim",  "res",      "p",         "q",              "r",
      "family", "lambda", "lambda-list", "eps",          "grad-tol",
      "constraint-tol", "max-iters", "seed",          "out-dir"};
  return keys;
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double("lambda-list", item));
  }
  return out;
}

void set_config_value(RunConfig& config, const std::string& key,
                      const std::string& value) {
  SolverConfig& s = config.solver;
  if (key == "dim") {
    s.params.dimension = static_cast<int>(parse_integer(key, value));
  } else if (key == "res") {
    s.resolution = static_cast<int>(parse_integer(key, value));
  } else if (key == "p") {
    s.params.p = parse_double(key, value);
  } else if (key == "q") {
    s.nl.q = parse_double(key, value);
  } else if (key == "r") {
    s.nl.r = parse_double(key, value);
  } else if (key == "family") {
    s.nl.family = parse_family(value);
  } else if (key == "lambda") {
    s.params.lambda = parse_double(key, value);
  } else if (key == "lambda-list") {
    config.lambda_list = parse_lambda_list(value);
  } else if (key == "eps") {
    s.params.eps = parse_double(key, value);
  } else if (key == "grad-tol") {
    s.grad_tol = parse_double(key, value);
  } else if (key == "constraint-tol") {
    s.constraint_tol = parse_double(key, value);
  } else if (key == "max-iters") {
    s.max_iters = static_cast<int>(parse_integer(key, value));
  } else if (key == "seed") {
    const long long seed = parse_integer(key, value);
    if (seed < 0) config_error("seed must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
  } else if (key == "out-dir") {
    config.out_dir = value;
  } else {
    config_error("unknown config key '" + key + "'");
  }
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig config;
  config.solver.params = RunParameters{2.0, 3, 50.0, 1e-8};
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) config_error("repeated config key '" + key + "'");
    set_config_value(config, key, value);
  }
  // r defaults to q; the growth constants follow the family.
  const double r = seen.count("r") ? config.solver.nl.r : config.solver.nl.q;
  config.solver.nl = Nonlinearity::with_default_constants(
      config.solver.nl.family, config.solver.nl.q, r);
  config.solver.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  return parse_run_config(in);
}

void write_field_csv(const Mesh& mesh, const GridFunction& u, std::ostream& out) {
  require_on_mesh(mesh, u);
  out << (mesh.dimension() == 2 ? "x,y,value\n" : "x,y,z,value\n");
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    for (double x : mesh.coords(v)) out << format_double(x) << ',';
    out << format_double(u[v]) << '\n';
  }
}

GridFunction read_field_csv(const Mesh& mesh, std::istream& in) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::Dimension, "field file: " + what);
  };
  std::string line;
  const std::string header = mesh.dimension() == 2 ? "x,y,value" : "x,y,z,value";
  if (!std::getline(in, line) || trim(line) != header) {
    fail("expected header '" + header + "'");
  }
  std::vector<double> values;
  values.reserve(mesh.num_vertices());
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (values.size() == mesh.num_vertices()) fail("more rows than vertices");
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double x = 0.0;
      const std::string t = trim(cell);
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
      if (ec != std::errc() || ptr != t.data() + t.size()) {
        fail("malformed number '" + t + "'");
      }
      row.push_back(x);
    }
    if (row.size() != static_cast<std::size_t>(mesh.dimension() + 1)) {
      fail("wrong number of columns");
    }
    auto coords = mesh.coords(values.size());
    for (int d = 0; d < mesh.dimension(); ++d) {
      if (std::abs(row[d] - coords[d]) > 1e-12) fail("vertex coordinates differ");
    }
    values.push_back(row.back());
  }
  if (values.size() != mesh.num_vertices()) {
    fail("has " + std::to_string(values.size()) + " rows, mesh has " +
         std::to_string(mesh.num_vertices()) + " vertices");
  }
  return GridFunction(mesh, std::move(values));
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "lambda,t_lambda,c1,c2,c3,threshold1,threshold2,threshold3\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRow& row : rows) {
    const bool scaled = row.t_lambda > 0.0;
    out << format_double(row.lambda) << ','
        << format_double(scaled ? row.t_lambda : nan);
    for (int i = 0; i < 3; ++i) {
      out << ',' << format_double(row.solved[i] ? row.energy[i] : nan);
    }
    for (int i = 0; i < 3; ++i) {
      out << ',' << (row.solved[i] ? (row.below_threshold[i] ? "1" : "0") : "nan");
    }
    out << '\n';
  }
}

void print_checks(const std::vector<CheckReport>& checks, std::ostream& out) {
  for (const CheckReport& check : checks) {
    for (const Measurement& m : check.measurements) {
      out << check.name << '.' << m.name << ' ' << (m.ok() ? "PASS" : "FAIL")
          << ' ' << format_double(m.value) << ' '
          << (m.relation == Relation::Above ? ">" : "<=") << m.tolerance << '\n';
    }
  }
}

namespace {

nlohmann::json report_json(const SolveReport& r) {
  nlohmann::json j;
  j["set"] = to_string(r.k);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["energy"] = r.energy;
  j["constraint_residual_pos"] = r.constraint_residual_pos;
  j["constraint_residual_neg"] = r.constraint_residual_neg;
  j["max_iterate_constraint_residual"] = r.max_iterate_constraint_residual;
  j["projected_residual"] = r.projected_residual;
  j["threshold"] = r.threshold;
  j["below_threshold"] = r.below_threshold;
  j["energy_history"] = r.energy_history;
  j["error"] = r.error;
  return j;
}

}  // namespace

std::string triple_json(const RunConfig& config, const SolutionTriple& triple,
                        const std::vector<CheckReport>& checks) {
  const SolverConfig& s = config.solver;
  nlohmann::json j;
  j["config"] = {{"dim", s.params.dimension},
                 {"res", s.resolution},
                 {"p", s.params.p},
                 {"q", s.nl.q},
                 {"r", s.nl.r},
                 {"family", to_string(s.nl.family)},
                 {"lambda", s.params.lambda},
                 {"eps", s.params.eps},
                 {"grad-tol", s.grad_tol},
                 {"constraint-tol", s.constraint_tol},
                 {"max-iters", s.max_iters},
                 {"seed", s.seed},
                 {"c1", s.nl.c1},
                 {"c3", s.nl.c3},
                 {"c4", std::isinf(s.nl.c4) ? nlohmann::json("inf")
                                            : nlohmann::json(s.nl.c4)},
                 {"k2", s.nl.k2}};
  j["reports"] = {{"u1", report_json(triple.r1)},
                  {"u2", report_json(triple.r2)},
                  {"u3", report_json(triple.r3)}};
  j["min_pairwise_difference"] = triple.min_pairwise_difference;
  j["distinct"] = triple.distinct;
  j["error"] = triple.error;
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const CheckReport& c : checks) {
    nlohmann::json m = nlohmann::json::array();
    for (const Measurement& x : c.measurements) {
      m.push_back({{"name", x.name},
                   {"value", x.value},
                   {"tolerance", x.tolerance},
                   {"relation", x.relation == Relation::Above ? ">" : "<="},
                   {"pass", x.ok()}});
    }
    list.push_back({{"name", c.name}, {"pass", c.passed()}, {"measurements", m}});
    all = all && c.passed();
  }
  j["checks"] = list;
  j["all_checks_passed"] = all;
  return j.dump(2) + "\n";
}

}  // namespace critp
