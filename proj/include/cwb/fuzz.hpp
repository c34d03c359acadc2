// cwb: randomized exploration of transaction sequences.
// SPDX-License-Identifier: Apache-2.0
//
// Each iteration draws a fresh transaction sequence from the configured
// domains and runs it with a seeded adversary. Derived per-iteration seeds
// make every iteration independent of the others, so the whole campaign is
// reproducible from (seed, iterations) alone and each violating iteration
// is replayable from just its own trace.
#pragma once

#include "cwb/trace.hpp"

namespace cwb {

Report fuzz(const RunConfig& cfg, std::uint64_t seed, std::uint64_t iterations);

} // namespace cwb
