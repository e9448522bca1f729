#pragma once

#include <iosfwd>

namespace qcdj {

/// Command-line front end. Subcommands: divergence, minimax, beta, stein,
/// verify. Reports go to --out or the given output stream; diagnostics go to
/// the error stream.
///
/// Exit codes: 0 success (including honest non-convergence, flagged in the
/// report), 1 usage or input-file error, 2 headline value is a
/// support-violation infinity, 3 dimension cap exceeded, 4 verification
/// found hard invariant violations.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace qcdj
