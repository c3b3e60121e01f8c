#ifndef RBLAB_CLI_HPP
#define RBLAB_CLI_HPP

#include <iosfwd>

namespace rblab {

/// Entry point of the `rblab` tool. Returns the process exit code: 0 iff the
/// command ran without errors and printed no FAIL line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rblab

#endif  // RBLAB_CLI_HPP
