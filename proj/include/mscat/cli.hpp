// Command-line driver.  Subcommands: direct, inverse, roundtrip, stargraph,
// selftest.  --out is a path prefix: direct writes <out>.data, inverse and
// stargraph write <out>.q (potential format) and inverse also <out>.u
// (boundary format); roundtrip writes all three when --out is given.
//
// Exit codes (stable): 0 success, 1 generic failure, 2 parse (file or
// command line), 3 validation, 4 solver, 5 insufficient scattering decay,
// 6 file system.  roundtrip additionally exits 1 when the reconstruction
// misses the configured tolerances.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mscat {

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

// Convenience overload for tests: args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mscat
