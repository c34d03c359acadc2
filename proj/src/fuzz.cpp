// cwb: randomized exploration of transaction sequences.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/fuzz.hpp"

#include <random>
#include <unordered_set>
#include <utility>

#include "cwb/check.hpp"
#include "cwb/exec.hpp"
#include "cwb/explore.hpp"

namespace cwb {

Report fuzz(const RunConfig& cfg, std::uint64_t seed, std::uint64_t iterations) {
    // Validate the configuration the same way a real run would, up front.
    initial_world(cfg);
    const std::vector<Transaction> domain = transaction_domain(cfg);
    CWB_CHECK(!domain.empty());

    Report rep;
    rep.mode = "fuzz";
    rep.config = cfg;
    // Random sampling never certifies the whole space.
    rep.complete = false;

    RunCounters totals;
    unsigned __int128 frames_total = 0;
    std::unordered_set<std::string> end_worlds;

    // One master stream yields two derived seeds per iteration, so iteration
    // i is fully determined by (seed, i): one seed shapes the transaction
    // sequence, the other drives the adversary tape. Keeping them apart means
    // a recorded tape replays against the recorded transactions without the
    // shape draws interleaving.
    std::mt19937_64 master(seed);
    for (std::uint64_t i = 0; i < iterations; ++i) {
        const std::uint64_t shape_seed = master();
        const std::uint64_t tape_seed = master();

        std::mt19937_64 shape(shape_seed);
        std::vector<Transaction> txs;
        if (cfg.max_transactions > 0) {
            const std::uint64_t len = 1 + shape() % cfg.max_transactions;
            txs.reserve(len);
            for (std::uint64_t k = 0; k < len; ++k)
                txs.push_back(domain[shape() % domain.size()]);
        }

        ChoiceSource cs = ChoiceSource::seeded(tape_seed);
        SequenceResult seq = run_sequence(cfg, txs, cs);

        totals.add(seq.counters);
        rep.stats.transactions_explored += seq.trace.transactions.size();
        frames_total += seq.trace.frames.size();
        const auto key = world_exec_key(seq.final_world);
        end_worlds.insert(std::string(key.begin(), key.end()));

        if (seq.trace.violation) {
            rep.violating_runs += 1;
            if (rep.violations.size() < cfg.max_violation_traces) {
                Violation v = *seq.trace.violation;
                rep.violations.push_back(ViolationRecord{std::move(v), std::move(seq.trace)});
            }
        }
    }

    rep.stats.worlds = end_worlds.size();
    rep.stats.branches = u128_to_string(static_cast<unsigned __int128>(iterations));
    rep.stats.frames_total = u128_to_string(frames_total);
    rep.stats.invariant_checks = totals.invariant_checks;
    rep.stats.gas_checks = totals.gas_checks;
    rep.stats.purity_checks = totals.purity_checks;
    rep.stats.history_checks = totals.history_checks;
    return rep;
}

} // namespace cwb
