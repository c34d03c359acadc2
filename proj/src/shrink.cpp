// cwb: counterexample minimization by delta debugging.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/shrink.hpp"

#include <algorithm>
#include <optional>
#include <utility>

#include "cwb/check.hpp"
#include "cwb/exec.hpp"

namespace cwb {

namespace {

// What the minimized run must still exhibit.
struct Goal {
    ViolationKind kind = ViolationKind::InvariantAtBoundary;
    std::optional<ConservationClass> cls; // token models only
};

struct Runner {
    const RunConfig& cfg;
    Goal goal;
    std::uint64_t candidates = 0;

    bool violates_like(const std::vector<Transaction>& txs,
                       const std::vector<std::uint64_t>& tape) {
        ++candidates;
        ChoiceSource cs = ChoiceSource::scripted(tape);
        SequenceResult seq;
        try {
            seq = run_sequence(cfg, txs, cs);
        } catch (const ChoiceExhausted&) {
            return false;
        }
        if (!seq.trace.violation || seq.trace.violation->kind != goal.kind)
            return false;
        if (goal.cls && conservation_class(token_of(seq.final_world)) != *goal.cls)
            return false;
        return true;
    }
};

// Classic ddmin to 1-minimality: repeatedly try dropping one contiguous
// chunk; shrink the chunk size only when no chunk of the current size can
// go. Finishes by trying the empty sequence when a single element remains.
template <typename T, typename Keeps>
std::vector<T> ddmin(std::vector<T> cur, const Keeps& keeps_violation) {
    std::size_t granularity = 2;
    while (cur.size() >= 2) {
        const std::size_t chunk = (cur.size() + granularity - 1) / granularity;
        bool reduced = false;
        for (std::size_t start = 0; start < cur.size(); start += chunk) {
            const std::size_t stop = std::min(start + chunk, cur.size());
            std::vector<T> cand;
            cand.reserve(cur.size() - (stop - start));
            cand.insert(cand.end(), cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(start));
            cand.insert(cand.end(), cur.begin() + static_cast<std::ptrdiff_t>(stop), cur.end());
            if (cand.size() < cur.size() && keeps_violation(cand)) {
                cur = std::move(cand);
                granularity = std::max<std::size_t>(granularity - 1, 2);
                reduced = true;
                break;
            }
        }
        if (reduced)
            continue;
        if (granularity >= cur.size())
            break;
        granularity = std::min(granularity * 2, cur.size());
    }
    if (cur.size() == 1 && keeps_violation(std::vector<T>{}))
        cur.clear();
    return cur;
}

} // namespace

ShrinkResult shrink(const Trace& input) {
    const RunConfig& cfg = input.config;

    Runner runner{cfg, Goal{}, 0};
    {
        ChoiceSource cs = ChoiceSource::scripted(input.choices);
        SequenceResult base;
        try {
            base = run_sequence(cfg, input.transactions, cs);
        } catch (const ChoiceExhausted&) {
            throw NotAViolation("the input trace does not replay: its choice tape runs dry");
        }
        if (!base.trace.violation)
            throw NotAViolation("the input trace replays cleanly; there is nothing to shrink");
        runner.goal.kind = base.trace.violation->kind;
        if (is_token_model(cfg.model))
            runner.goal.cls = conservation_class(token_of(base.final_world));
    }

    std::vector<Transaction> txs = input.transactions;
    std::vector<std::uint64_t> tape = input.choices;
    std::uint64_t rounds = 0;
    for (;;) {
        ++rounds;
        const std::size_t before_txs = txs.size();
        const std::size_t before_tape = tape.size();
        txs = ddmin(std::move(txs),
                    [&](const std::vector<Transaction>& cand) {
                        return runner.violates_like(cand, tape);
                    });
        tape = ddmin(std::move(tape),
                     [&](const std::vector<std::uint64_t>& cand) {
                         return runner.violates_like(txs, cand);
                     });
        if (txs.size() == before_txs && tape.size() == before_tape)
            break;
    }

    // Re-record the minimal run so frames, hashes and the consumed tape in
    // the output are exactly what a replay will see.
    ChoiceSource cs = ChoiceSource::scripted(tape);
    SequenceResult final_run = run_sequence(cfg, txs, cs);
    CWB_CHECK(final_run.trace.violation.has_value());
    CWB_CHECK(final_run.trace.violation->kind == runner.goal.kind);
    // At 1-minimality nothing trails the violation: every transaction ran
    // and every tape entry was consumed, else ddmin would have dropped it.
    CWB_CHECK(final_run.trace.transactions.size() == txs.size());
    CWB_CHECK(cs.fully_consumed());

    ShrinkResult out;
    out.trace = std::move(final_run.trace);
    out.candidates_tried = runner.candidates;
    out.rounds = rounds;
    return out;
}

} // namespace cwb
