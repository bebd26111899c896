#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tss {

// Exit status: 0 success, 1 verdict failure, 2 usage or parse error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tss
