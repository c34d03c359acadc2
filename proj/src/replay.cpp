// cwb: exact re-execution of recorded traces.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/replay.hpp"

#include <sstream>

namespace cwb {

namespace {

std::string describe_violation(const std::optional<Violation>& v) {
    if (!v)
        return "none";
    std::ostringstream os;
    os << violation_kind_name(v->kind) << " at frame " << v->frame;
    return os.str();
}

} // namespace

ReplayResult replay(const Trace& trace) {
    ReplayResult out;
    ChoiceSource cs = ChoiceSource::scripted(trace.choices);
    SequenceResult run;
    try {
        run = run_sequence(trace.config, trace.transactions, cs);
    } catch (const ChoiceExhausted&) {
        out.divergences.push_back("the run consumed more choices than the trace records");
        return out;
    }

    if (!cs.fully_consumed()) {
        std::ostringstream os;
        os << "the run consumed " << cs.consumed().size() << " of " << trace.choices.size()
           << " recorded choices";
        out.divergences.push_back(os.str());
    }

    if (run.trace.transactions.size() != trace.transactions.size()) {
        std::ostringstream os;
        os << "the run executed " << run.trace.transactions.size() << " of "
           << trace.transactions.size() << " recorded transactions";
        out.divergences.push_back(os.str());
    }

    const bool same_violation = [&] {
        if (run.trace.violation.has_value() != trace.violation.has_value())
            return false;
        return !trace.violation || *run.trace.violation == *trace.violation;
    }();
    if (!same_violation) {
        out.divergences.push_back("violation verdict differs: recorded " +
                                  describe_violation(trace.violation) + ", replayed " +
                                  describe_violation(run.trace.violation));
    }

    // Hand-written traces may omit frames; only recorded ones are binding.
    if (!trace.frames.empty()) {
        if (run.trace.frames.size() != trace.frames.size()) {
            std::ostringstream os;
            os << "frame count differs: recorded " << trace.frames.size() << ", replayed "
               << run.trace.frames.size();
            out.divergences.push_back(os.str());
        } else {
            for (std::size_t i = 0; i < trace.frames.size(); ++i) {
                if (to_json(run.trace.frames[i]) == to_json(trace.frames[i]))
                    continue;
                std::ostringstream os;
                os << "frame " << i << " differs from the recording";
                out.divergences.push_back(os.str());
                break;
            }
        }
    }

    out.run = std::move(run);
    return out;
}

} // namespace cwb
