// filtap run <problem.json> [--out F] [--order N] [--trace] [--seed S] [--timings]
// filtap verify <report.json> <problem.json>
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "filtap/cli.hpp"

namespace fs = std::filesystem;
using namespace filtap::cli;

int main(int argc, char** argv) {
  CLI::App app{"Certified lifts of approximate solutions, and flat-function numerics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Solve a problem file and print its report");
  std::string problem_path, out_path;
  std::optional<unsigned> order;
  std::optional<std::uint64_t> seed;
  bool trace = false, timings = false;
  run->add_option("problem", problem_path, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_path, "Write the report here instead of standard output");
  run->add_option("--order", order, "Override the task's principal order");
  run->add_flag("--trace", trace, "Include the iteration trace");
  run->add_option("--seed", seed, "Shift generated borel grids by a seeded sub-step offset");
  run->add_flag("--timings", timings, "Include wall-clock timings (breaks byte-identical reruns)");

  auto* verify = app.add_subcommand("verify", "Re-check every certificate in a report");
  std::string report_path, vproblem_path;
  verify->add_option("report", report_path, "Report file (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("problem", vproblem_path, "Problem file the report claims to answer")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    RunFlags flags;
    flags.order = order;
    flags.seed = seed;
    flags.trace = trace;
    flags.timings = timings;
    flags.artifact_dir = out_path.empty() ? fs::path(".") : fs::path(out_path).parent_path();
    if (flags.artifact_dir.empty()) flags.artifact_dir = ".";
    Outcome o = run_file(problem_path, flags);
    std::string text = render(o.report);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
      }
      out << text;
    }
    if (o.exit_code != 0) std::cerr << o.report["status"].get<std::string>() << ": " << o.report["reason"].dump() << "\n";
    return o.exit_code;
  }

  VerifyOutcome v = verify_files(report_path, vproblem_path);
  (v.exit_code == 0 ? std::cout : std::cerr) << v.message << "\n";
  return v.exit_code;
}
