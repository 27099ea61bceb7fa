#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "thermoplate/config.hpp"

namespace thermoplate {

enum class ExitCode : int { ok = 0, config = 1, blowup = 2, verification = 3 };

struct RunOptions {
  std::string output_dir;  // empty: use output.dir from the config
  unsigned threads = 1;
  std::string format;      // empty: use output.format
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  ExitCode code = ExitCode::ok;
  std::string report;      // JSON run report, also written to report.json
  std::string output_dir;
};

// Each command writes its files plus report.json into the output directory.
// Configuration and admissibility problems throw Error, blow-up throws
// BlowUpError; failed checks come back as ExitCode::verification.
CommandResult cmd_simulate(ExperimentConfig config, const RunOptions& options);
CommandResult cmd_verify(ExperimentConfig config, const RunOptions& options);
CommandResult cmd_attractor(ExperimentConfig config, const RunOptions& options);
CommandResult cmd_decay_fit(ExperimentConfig config, const RunOptions& options);
CommandResult cmd_operator_check(ExperimentConfig config, const RunOptions& options);

inline constexpr int kReportSchemaVersion = 1;

}  // namespace thermoplate
