// cwb: exact re-execution of recorded traces.
// SPDX-License-Identifier: Apache-2.0
//
// Replays a trace's transactions against its recorded configuration, feeding
// the adversary the recorded choice tape, and compares what happens against
// what the trace says happened. A faithful replay consumes exactly the whole
// tape, reproduces every recorded frame bit for bit (hashes included) and
// ends in the same violation verdict. Divergences are reported as readable
// sentences, one per difference class, rather than as a bare flag.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwb/exec.hpp"

namespace cwb {

struct ReplayResult {
    // Missing only when the tape ran out mid-run; every other divergence
    // still yields the full re-executed result.
    std::optional<SequenceResult> run;
    std::vector<std::string> divergences;

    bool matches() const { return divergences.empty(); }
};

ReplayResult replay(const Trace& trace);

} // namespace cwb
