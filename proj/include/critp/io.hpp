#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "critp/optimizer.hpp"
#include "critp/verify.hpp"

namespace critp {

/// Contents of a run configuration file: `key = value` lines, `#` comments.
struct RunConfig {
  SolverConfig solver;
  std::vector<double> lambda_list;
  std::filesystem::path out_dir = ".";
};

/// Recognized keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Parses and validates; unknown or repeated keys and malformed values throw
/// Error(Config).
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies one `key`/`value` pair; shared by the file parser and CLI overrides.
void set_config_value(RunConfig& config, const std::string& key,
                      const std::string& value);

std::vector<double> parse_lambda_list(const std::string& text);

/// CSV with header `x,y[,z],value` and one row per vertex, 17 significant
/// digits.
void write_field_csv(const Mesh& mesh, const GridFunction& u, std::ostream& out);
/// Reads a field written by `write_field_csv`; the header, row count and
/// vertex coordinates must match `mesh` (Error(Dimension) otherwise).
GridFunction read_field_csv(const Mesh& mesh, std::istream& in);

/// Header `lambda,t_lambda,c1,c2,c3,threshold1,threshold2,threshold3`.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Line `name PASS|FAIL measured tolerance` per measurement.
void print_checks(const std::vector<CheckReport>& checks, std::ostream& out);

/// Deterministic JSON text for triple.json.
std::string triple_json(const RunConfig& config, const SolutionTriple& triple,
                        const std::vector<CheckReport>& checks);

}  // namespace critp
