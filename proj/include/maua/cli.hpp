#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maua {

enum ExitStatus : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

// args[0] is the program name. File arguments may be "-" for stdin.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace maua
