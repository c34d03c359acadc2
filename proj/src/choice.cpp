// cwb: the adversary's choice tape.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/choice.hpp"

#include "cwb/check.hpp"

namespace cwb {

ChoiceSource ChoiceSource::scripted(std::vector<std::uint64_t> tape) {
    ChoiceSource cs;
    cs.scripted_ = true;
    cs.tape_ = std::move(tape);
    return cs;
}

ChoiceSource ChoiceSource::seeded(std::uint64_t seed) {
    ChoiceSource cs;
    cs.scripted_ = false;
    cs.engine_.seed(seed);
    return cs;
}

std::uint64_t ChoiceSource::next() {
    std::uint64_t v = 0;
    if (scripted_) {
        if (cursor_ >= tape_.size())
            throw ChoiceExhausted{};
        v = tape_[cursor_++];
    } else {
        // Small draws keep logged tapes readable; decoders reduce mod the
        // domain size anyway.
        v = engine_() & 0xffffu;
    }
    consumed_.push_back(v);
    return v;
}

bool ChoiceSource::fully_consumed() const {
    return !scripted_ || cursor_ == tape_.size();
}

std::uint64_t havoc_nat(ChoiceSource& cs) {
    return cs.next();
}

bool havoc_bool(ChoiceSource& cs) {
    return cs.next() % 2 == 1;
}

Address havoc_address(ChoiceSource& cs, const HavocDomains& dom) {
    CWB_REQUIRE(dom.n_addresses >= 1 && dom.n_addresses <= kMaxAddresses);
    const std::uint64_t n = cs.next();
    return Address{static_cast<std::uint8_t>(n % dom.n_addresses), false};
}

U256 havoc_amount(ChoiceSource& cs, const HavocDomains& dom) {
    CWB_REQUIRE(!dom.amounts.empty());
    const std::uint64_t n = cs.next();
    return dom.amounts[n % dom.amounts.size()];
}

Msg havoc_msg(ChoiceSource& cs, const HavocDomains& dom) {
    return Msg{havoc_address(cs, dom), U256()};
}

CallResult havoc_result(ChoiceSource& cs) {
    return cs.next() % 2 == 0 ? CallResult::revert() : CallResult::success();
}

} // namespace cwb
