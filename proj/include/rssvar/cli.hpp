#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rssvar::cli {

// Fixed default base seed. Documented (README) so that published table outputs
// are reproducible verbatim; chosen up front, not tuned.
inline constexpr std::uint64_t kDefaultSeed = 123456789ULL;

// Runs the full command line (arguments without the program name) and returns
// the process exit code: 0 success, 1 usage error, 2 input-data error,
// 3 numerical/degenerate error. Results go to `out`, progress and error
// messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rssvar::cli
