#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "smvi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Hybrid projection solver for split monotone inclusion problems"};
  app.require_subcommand(1);

  smvi::RunManifest manifest;
  auto* run = app.add_subcommand(
      "run", "solve a problem and write a trace CSV plus a summary JSON");
  run->add_option("--problem", manifest.problem_ref,
                  "box:<seed> | planted:<seed> | l1:<seed> | problem JSON path")
      ->required();
  run->add_option("--config", manifest.config_path,
                  "flat key=value file overriding the recommended config");
  run->add_option("--out", manifest.trace_path, "trace CSV path")
      ->capture_default_str();
  run->add_option("--summary", manifest.summary_path, "summary JSON path")
      ->capture_default_str();
  run->add_option("--max-iter", manifest.max_iter_override,
                  "override the iteration budget");
  run->add_option("--stop-tol", manifest.stop_tol_override,
                  "override the stopping tolerance");
  run->add_flag("-v,--verbose", manifest.verbosity, "more per-run output");

  std::string trace_path;
  auto* verify = app.add_subcommand(
      "verify", "re-check a trace CSV offline and print a pass/fail table");
  verify->add_option("trace", trace_path, "trace CSV to check")->required();

  std::string make_ref;
  std::string make_out;
  auto* make = app.add_subcommand("make-problem",
                                  "generate a problem and save it as JSON");
  make->add_option("--problem", make_ref, "box:<seed> | planted:<seed> | l1:<seed>")
      ->required();
  make->add_option("--out", make_out, "output JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return smvi::cmd_run(manifest, std::cout, std::cerr);
    if (verify->parsed()) {
      return smvi::cmd_verify(trace_path, std::cout, std::cerr);
    }
    if (make->parsed()) {
      return smvi::cmd_make_problem(make_ref, make_out, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return smvi::kExitError;
  }
  return smvi::kExitError;
}
