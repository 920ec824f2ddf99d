#pragma once

#include <iosfwd>

namespace slb::cli {

/// Entry point of the `slb` tool. Exit codes: 0 success, 1 a check or run
/// failed, 2 bad flags or configuration, 3 overflow or enumeration-budget refusal.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slb::cli
