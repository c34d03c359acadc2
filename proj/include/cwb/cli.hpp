// cwb: command line front end.
// SPDX-License-Identifier: Apache-2.0
//
// The whole interface lives behind one function so tests can drive it in
// process and inspect its streams and exit codes without spawning.
// Exit codes: 0 completed with no violations, 1 usage or configuration or
// internal error, 2 violations found (reports are still written), 3 replay
// divergence.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cwb {

inline constexpr int kExitClean = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolations = 2;
inline constexpr int kExitDivergence = 3;

// `args` holds the arguments only, no program name, in natural order.
int cwb_cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace cwb
