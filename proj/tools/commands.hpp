#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vshd::cli {

enum ExitCode : int {
	kOk = 0,
	kFailure = 1,
	kConfigError = 2,
	kCollision = 3,
};

/// Entry point shared by the executable and the tests; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace vshd::cli
