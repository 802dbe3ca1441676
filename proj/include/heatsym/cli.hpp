#pragma once

// Command-line front end: classify, check, reduce, shoot, exact, figure1,
// validate. Reports are `key: value` lines starting with the config echo;
// failed checks are listed as `failure: ...` lines at the end.

#include <iosfwd>
#include <string>
#include <vector>

namespace heatsym {

// args excludes the program name. Returns the exit code: 0 when every
// requested check passed, 1 when one failed, 2 on usage or input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heatsym
