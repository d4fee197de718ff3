#pragma once

// Command-line front end:
//
//   femsyn [--seed N] [--out-dir DIR] [--config FILE] <command> ...
//     fit      --input <csv> [--share-offsets]
//     merz     --fits <report> [--tau-inf <s> | --search <lo,hi>]
//     collapse --input <csv> --fits <report>
//     levels   --input <csv> [--margin <nm>]
//     simulate --config <cfg> --out <csv>
//     program  --fits <report> --targets <s1,s2,...>
//
// Reports go to the output directory (default ".", overridable with the
// FEMSYN_OUT_DIR environment variable); plot data goes to <out-dir>/plot.

#include <iosfwd>
#include <span>
#include <string>

namespace femsyn::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kUsageError = 2,    ///< bad arguments, unknown command, invalid config
    kParseError = 3,    ///< malformed input file
    kNumericError = 4,  ///< fit/regression/domain failures
    kIoError = 5,
};

/// Runs one invocation. args[0] is the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace femsyn::cli
