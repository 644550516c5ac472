#ifndef NILMEL_CLI_HPP
#define NILMEL_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace nilmel {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;   // bad arguments, config or input files
inline constexpr int kExitNumeric = 3;  // quadrature, precision or fit failures

// Runs one command. args excludes the program name. Artifacts go to `out` unless
// --output is given; diagnostics are one JSON object on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nilmel

#endif
