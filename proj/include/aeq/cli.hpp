#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aeq::cli {

// Front door used by the aeqsim binary and by the tests.  `args` excludes
// the program name.  Exit status: 0 success, 1 module error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace aeq::cli
