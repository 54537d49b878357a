#pragma once

namespace simukit::cli {

// Exit codes: 0 success, 1 domain failure (validation fail, execution fail,
// Failed run), 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace simukit::cli
