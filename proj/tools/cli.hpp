#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kleinian::cli {

// Exit codes: 0 ok, 2 config error, 3 precondition violation, 4 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kleinian::cli
