#pragma once

#include <iosfwd>

namespace lossyosc::cli {

/// Entry point of the lossyosc executable; returns the process exit code
/// (0 success, 1 invalid input, 2 numerical failure).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lossyosc::cli
