#pragma once

#include <iosfwd>

namespace evcore::cli {

// Entry point behind the `evcore` executable. Exit codes: 0 success,
// 1 usage/config/domain error, 2 numerical abort.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evcore::cli
