#pragma once

#include <string>

#include "qcdj/channels.hpp"
#include "qcdj/matrix.hpp"

namespace qcdj {

/// State files are JSON objects {"dim": d, "matrix": [[[re,im],...],...]}
/// with the matrix row-major and complex entries as [re, im] pairs. Parsing
/// validates Hermiticity, positivity, and unit trace; malformed files and
/// physics violations throw std::invalid_argument.
Mat parse_state_file(const std::string& path);

/// Writes a matrix in the state-file layout. No validation: emitters may
/// store work-in-progress operators, the checks run on load.
void write_state_file(const std::string& path, const Mat& rho);

/// Channel files are JSON objects {"dims": {"A", "E", "B"},
/// "trace_preserving": bool, ...} carrying exactly one of "kraus" (a list of
/// dB x (dA*dE) complex matrices) or "choi" (the (dA*dE*dB)-dimensional Choi
/// matrix, input factor most significant). Complete positivity is checked on
/// the Choi form and the completeness relation when trace_preserving is set;
/// violations throw std::invalid_argument.
Channel parse_channel_file(const std::string& path);

/// Writes a channel in Kraus form in the channel-file layout.
void write_channel_file(const std::string& path, const Channel& c);

/// Scalar rendering used in every report: 12 significant decimal digits,
/// infinities as "inf"/"-inf", NaN as "nan".
std::string format_real(double v);

}  // namespace qcdj
