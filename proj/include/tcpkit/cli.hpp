// Command-line front end. Exit codes: 0 done, 2 malformed input or usage,
// 3 solve ended unknown without a solution, 4 classify/solve/membership
// failure, 5 perturbation probe failure (including unmet hypotheses),
// 6 distance failure.
#pragma once

#include <ostream>

namespace tcpkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitUnknown = 3;
inline constexpr int kExitSolve = 4;
inline constexpr int kExitPerturb = 5;
inline constexpr int kExitDistance = 6;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tcpkit::cli
