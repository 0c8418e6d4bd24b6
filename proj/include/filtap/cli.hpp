// Problem files in, reports out. Both are JSON; every polynomial, ideal and
// jet travels as a string in the expression grammar.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace filtap::cli {

using json = nlohmann::json;

inline constexpr const char* kProblemFormat = "fap-problem/1";
inline constexpr const char* kReportFormat = "fap-report/1";

struct RunFlags {
  std::optional<unsigned> order;  // replaces the task's principal order
  bool trace = false;
  std::optional<std::uint64_t> seed;  // shifts generated borel grids
  bool timings = false;
  /// Where borel CSV files go; names in the report are relative to it.
  std::filesystem::path artifact_dir = ".";
};

struct Outcome {
  int exit_code = 0;  // run: 0 ok, 2 refused, 1 error
  json report;
};

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string problem_digest(const json& problem);

/// `base_dir` resolves relative file references inside the problem.
Outcome run_problem(const json& problem, const RunFlags& flags, const std::filesystem::path& base_dir);
Outcome run_file(const std::filesystem::path& problem_path, const RunFlags& flags);

struct VerifyOutcome {
  int exit_code = 0;  // 0 verified, 3 certificate mismatch, 1 anything else
  std::string message;
};

/// Re-checks the report's certificates against the problem. Refusals are
/// confirmed by reproducing the same reason code.
VerifyOutcome verify_report(const json& report, const json& problem, const std::filesystem::path& report_dir,
                            const std::filesystem::path& problem_dir);
VerifyOutcome verify_files(const std::filesystem::path& report_path, const std::filesystem::path& problem_path);

/// Parses a file as JSON; Io or Schema errors otherwise.
json load_json(const std::filesystem::path& path);
/// Stable text form: two-space indent, trailing newline.
std::string render(const json& doc);

}  // namespace filtap::cli
