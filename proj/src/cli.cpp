#include "critp/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

#include "critp/error.hpp"
#include "critp/io.hpp"
#include "critp/verify.hpp"

namespace critp::cli {

namespace {

VerifyTolerances tolerances_for(const SolverConfig& s) {
  VerifyTolerances tol;
  tol.constraint = s.constraint_tol;
  tol.identity = std::max(1e-9, s.constraint_tol);
  tol.euler_lagrange = 10.0 * s.grad_tol;
  return tol;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  writer(out);
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const SolverConfig& s = config.solver;
  const Mesh mesh = build_mesh(s.params.dimension, s.resolution);
  const SolutionTriple triple = solve_three(mesh, s);

  std::vector<CheckReport> checks = verify_fields(
      mesh, s.nl, s.params, {triple.u1, triple.u2, triple.u3}, tolerances_for(s));
  CheckReport solver{"solver", {}};
  const SolveReport* reports[3] = {&triple.r1, &triple.r2, &triple.r3};
  for (int i = 0; i < 3; ++i) {
    const std::string name = "u" + std::to_string(i + 1);
    solver.add(name + "_projected_residual", reports[i]->projected_residual,
               s.grad_tol);
    solver.add(name + "_failed", reports[i]->error.empty() ? 0.0 : 1.0, 0.0);
  }
  solver.add("min_pairwise_difference", triple.min_pairwise_difference, 1e-6,
             Relation::Above);
  checks.push_back(std::move(solver));

  std::filesystem::create_directories(config.out_dir);
  write_text(config.out_dir / "triple.json", triple_json(config, triple, checks));
  const GridFunction* fields[3] = {&triple.u1, &triple.u2, &triple.u3};
  for (int i = 0; i < 3; ++i) {
    write_file(config.out_dir / ("u" + std::to_string(i + 1) + ".csv"),
               [&](std::ostream& os) { write_field_csv(mesh, *fields[i], os); });
  }
  print_checks(checks, out);
  const bool ok = std::all_of(checks.begin(), checks.end(),
                              [](const CheckReport& c) { return c.passed(); });
  out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err,
              bool fibering_only) {
  if (config.lambda_list.empty()) {
    err << "critp sweep: lambda-list is empty\n";
    return kExitUsage;
  }
  const std::vector<SweepRow> rows =
      lambda_sweep(config.solver, config.lambda_list, !fibering_only);
  std::filesystem::create_directories(config.out_dir);
  write_file(config.out_dir / "sweep.csv",
             [&](std::ostream& os) { write_sweep_csv(rows, os); });
  write_sweep_csv(rows, out);
  std::size_t failed = 0;
  for (const SweepRow& row : rows) {
    if (!row.error.empty()) {
      ++failed;
      err << "lambda " << row.lambda << ": " << row.error << '\n';
    }
  }
  return failed == rows.size() ? kExitCheckFailed : kExitOk;
}

int cmd_verify(const RunConfig& config, const std::vector<std::string>& files,
               std::ostream& out) {
  const SolverConfig& s = config.solver;
  const Mesh mesh = build_mesh(s.params.dimension, s.resolution);
  std::vector<GridFunction> fields;
  for (const std::string& file : files) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Io, "cannot open field file " + file);
    fields.push_back(read_field_csv(mesh, in));
  }
  const std::vector<CheckReport> checks =
      verify_fields(mesh, s.nl, s.params, fields, tolerances_for(s));
  print_checks(checks, out);
  const bool ok = std::all_of(checks.begin(), checks.end(),
                              [](const CheckReport& c) { return c.passed(); });
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Three critical points of the critical-growth p-Laplace energy"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string lambda_list;
  bool fibering_only = false;
  std::vector<std::string> files;

  auto* solve = app.add_subcommand("solve", "compute u1 >= 0, u2 <= 0, u3 sign-changing");
  solve->add_option("--config", config_path, "run configuration file")->required();
  solve->add_option("--out-dir", out_dir, "override out-dir");

  auto* sweep = app.add_subcommand("sweep", "fibering scale and energies over lambda");
  sweep->add_option("--config", config_path, "run configuration file")->required();
  sweep->add_option("--out-dir", out_dir, "override out-dir");
  sweep->add_option("--lambda-list", lambda_list, "override lambda-list");
  sweep->add_flag("--fibering-only", fibering_only,
                  "only the t_lambda column; energies are nan");

  auto* verify = app.add_subcommand("verify", "check u1.csv [u2.csv [u3.csv]]");
  verify->add_option("--config", config_path, "run configuration file")->required();
  verify->add_option("files", files, "field files in the u*.csv schema")
      ->required()
      ->expected(1, 3);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "critp: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    RunConfig config = load_run_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!lambda_list.empty()) config.lambda_list = parse_lambda_list(lambda_list);
    if (solve->parsed()) return cmd_solve(config, out);
    if (sweep->parsed()) return cmd_sweep(config, out, err, fibering_only);
    return cmd_verify(config, files, out);
  } catch (const Error& e) {
    err << "critp: " << to_string(e.kind()) << ": " << e.what() << '\n';
    const bool usage = e.kind() == ErrorKind::Config ||
                       e.kind() == ErrorKind::Io ||
                       e.kind() == ErrorKind::Dimension;
    return usage ? kExitUsage : kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "critp: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace critp::cli
