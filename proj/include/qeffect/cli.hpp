#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qeffect::cli {

/// Seed used when --seed is absent.
inline constexpr std::uint64_t kDefaultSeed = 20021027;

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

/// Runs one command line (without the program name). Reports go to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qeffect::cli
