#pragma once

#include <iosfwd>

namespace dtar::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the dtar command line tool.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dtar::harness
