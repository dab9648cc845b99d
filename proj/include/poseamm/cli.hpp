#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace poseamm {

// Exit codes returned by run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// "min:step:max", inclusive of max. A single number is a one-level grid.
// Throws InvalidArgument on malformed input.
std::vector<double> parse_noise_grid(std::string_view text);

// Subcommands:
//   bench <problem>   noise sweep, CSV on stdout or --out
//   solve             single solve from a correspondence file
//   generate <problem> write a synthetic correspondence file
// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poseamm
