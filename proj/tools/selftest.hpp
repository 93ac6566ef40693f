#pragma once

#include <cstdint>

#include "cli_support.hpp"

namespace jspec::cli {

/// Invariant matrix: one row per (check, case) with value, tolerance and PASS/FAIL.
/// `all_pass` is cleared if any row fails.
Table run_selftest(bool quick, std::uint64_t seed, bool& all_pass);

}  // namespace jspec::cli
