#pragma once

// Command-line front end. Each subcommand runs one module operation and
// writes a JSON summary (--out-json) and a CSV detail table (--out-csv);
// without --out-json the JSON goes to `out`.

#include <iosfwd>
#include <string>
#include <vector>

namespace badapprox::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kConformance = 2,
  kGuard = 3,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace badapprox::cli
