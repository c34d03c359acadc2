// cwb: concrete transaction execution with checkpoints and frame recording.
// SPDX-License-Identifier: Apache-2.0
//
// Runs transaction sequences against a world, driving every adversarial
// decision from a ChoiceSource, and checks the contract obligations at each
// boundary: the conservation invariant at construction exit, method exits
// and adversarial-call entries; strict gas decrease along every call edge
// and across every frame; state purity of reverts; and the auction history
// discipline. The first failed check is recorded on the trace; the violating
// transaction still runs to completion so its trace is whole, and the
// sequence stops afterwards.
#pragma once

#include <vector>

#include "cwb/choice.hpp"
#include "cwb/trace.hpp"
#include "cwb/world.hpp"

namespace cwb {

struct RunCounters {
    std::uint64_t invariant_checks = 0;
    std::uint64_t gas_checks = 0;
    std::uint64_t purity_checks = 0;
    std::uint64_t history_checks = 0;
    // Adversary coverage: how often each branch of the havoc dispatch ran.
    std::uint64_t adversary_transfer_branch = 0;
    std::uint64_t adversary_mint_branch = 0;
    std::uint64_t adversary_skip_branch = 0;
    std::uint64_t adversary_recursions = 0;

    void add(const RunCounters& o);
};

// Construct the configured initial world: accounts funded far beyond any
// reachable flow and the contract deployed by address 0, with the optional
// seed mint applied. Throws ConfigError when the configuration cannot set up.
World initial_world(const RunConfig& cfg);

struct SequenceResult {
    Trace trace;
    World final_world;
    RunCounters counters;
};

// Execute transactions in order until the list ends or a violation has been
// recorded (the violating transaction finishes first). The trace keeps the
// executed prefix and exactly the consumed choice tape. Propagates
// ChoiceExhausted from scripted sources.
SequenceResult run_sequence(const RunConfig& cfg, const std::vector<Transaction>& txs,
                            ChoiceSource& cs);

// Same, but against a caller-supplied starting world instead of the
// configured initial one; no construction checkpoint is taken.
SequenceResult run_sequence_on(const RunConfig& cfg, World world,
                               const std::vector<Transaction>& txs, ChoiceSource& cs);

} // namespace cwb
