#pragma once

#include <ostream>

namespace cokrig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;    // bad arguments, files, or covariance specification
inline constexpr int kExitNumeric = 3;  // ill-conditioned or non-convergent numerics

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cokrig::cli
