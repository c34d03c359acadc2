// cwb: counterexample minimization by delta debugging.
// SPDX-License-Identifier: Apache-2.0
//
// Takes a violating trace and greedily removes transactions, then choice
// tape entries, re-running each candidate, until no single chunk of either
// can be dropped without losing the violation. A candidate counts as "the
// same violation" when it fails the same check kind and, on token models,
// leaves the final world in the same conservation class, so shrinking never
// trades the reported bug for a different one. The result is re-recorded
// from a fresh run, so its frames and hashes are exact; shrinking an already
// minimal trace reproduces it unchanged.
#pragma once

#include <stdexcept>

#include "cwb/trace.hpp"

namespace cwb {

// The input trace must reproduce a violation when replayed; anything else is
// a caller error, reported with this exception rather than a bogus result.
struct NotAViolation : std::runtime_error {
    explicit NotAViolation(const std::string& what) : std::runtime_error(what) {}
};

struct ShrinkResult {
    Trace trace;
    std::uint64_t candidates_tried = 0;
    std::uint64_t rounds = 0;
};

ShrinkResult shrink(const Trace& input);

} // namespace cwb
