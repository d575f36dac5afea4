#pragma once

namespace mvd::cli {

// Process exit codes. Failures also print one JSON line on stderr:
//   {"error": "<kind>", "message": "..."}
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,        // unknown flag or bad flag value
  kExitMissingFile = 3,  // a referenced input does not exist
  kExitSchema = 4,       // an input exists but does not follow its format
};

/// Entry point of the mvd_cli binary.
int run(int argc, char** argv);

}  // namespace mvd::cli
