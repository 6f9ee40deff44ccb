#ifndef XSDP_CLI_H_
#define XSDP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace xsdp {

// Environment variable naming the default JSON config file.
inline constexpr const char* kConfigEnv = "XSDP_CONFIG";

// Runs one subcommand (args[0] is the program name). Returns the exit status;
// diagnostics go to err, reports without an --out file go to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xsdp

#endif  // XSDP_CLI_H_
