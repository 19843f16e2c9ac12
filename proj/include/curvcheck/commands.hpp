#pragma once

/**
 * @file commands.hpp
 * @brief The command-line subcommands as library calls.
 *
 * Each command returns its report as JSON plus the process exit status, so
 * the executable and the tests share one code path. Errors are thrown and
 * mapped to exit codes by exit_code_for().
 */

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

#include <json.hpp>

#include "curvcheck/config.hpp"

namespace curvcheck {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNumeric = 3 };

struct RunOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> zoo;
  std::optional<std::string> field;
  std::optional<SolitonKind> kind;
  std::optional<ConnectionKind> connection;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
};

struct CommandResult {
  nlohmann::ordered_json report;
  int exit_code = kExitOk;
};

CommandResult cmd_curvature(const RunOptions& opt);
CommandResult cmd_classify(const RunOptions& opt);
CommandResult cmd_soliton(const RunOptions& opt);
/// With neither --config nor --zoo, runs every zoo manifold.
CommandResult cmd_check(const RunOptions& opt);
CommandResult cmd_paper_example(const RunOptions& opt);

/// Exit status for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Plain-text rendering of a report; numbers are printed with the same text as the JSON.
std::string render_human(const nlohmann::ordered_json& report);

std::string to_json_text(const nlohmann::ordered_json& report);

}  // namespace curvcheck
