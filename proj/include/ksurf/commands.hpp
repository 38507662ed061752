#pragma once

#include <string>
#include <vector>

#include "ksurf/config.hpp"
#include "ksurf/errors.hpp"
#include "ksurf/report_io.hpp"

namespace ksurf {

struct CommandOutcome {
  int exit_code = 0;
  Json report;
  std::vector<std::string> artifacts;  // file names inside cfg.out
  std::string summary;                 // human-readable, for stdout
};

int exit_code_for(ErrorClass c);
std::string status_for_exit_code(int code);

// Citation identifier of the hypothesis behind a precondition code; empty
// when the code is plain input validation.
std::string citation_for(const std::string& code);

CommandOutcome cmd_oracle(const RunConfig& cfg);
CommandOutcome cmd_solve_lens(const RunConfig& cfg);
CommandOutcome cmd_solve_plateau(const RunConfig& cfg);
CommandOutcome cmd_validate(const RunConfig& cfg);

// Validates the config, dispatches on cfg.command and maps errors to exit
// codes. Artifacts are written, the report is not.
CommandOutcome execute(const RunConfig& cfg);

// execute() and then <out>/report.json. A report that cannot be written
// turns the exit code into 4.
CommandOutcome run_command(const RunConfig& cfg);

}  // namespace ksurf
