#pragma once

#include <string>
#include <vector>

namespace leafseg {

/// Entry point used by both the binary and in-process tests. Exit codes:
/// 0 success, 1 I/O or usage error, 2 no leaf candidate.
int run_cli(const std::vector<std::string>& args);

} // namespace leafseg
