// cwb: the adversary's choice tape.
// SPDX-License-Identifier: Apache-2.0
//
// Every nondeterministic decision the adversarial environment makes is one
// draw of a natural number from a ChoiceSource. A source either replays a
// scripted tape, which every deterministic mode uses, or draws from a
// seeded generator (fuzzing). Each draw is logged, so any run, random or
// not, can be replayed exactly from its consumed tape.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cwb/core.hpp"

namespace cwb {

// Thrown when a scripted tape runs dry; enumeration and shrinking treat it
// as "this prefix does not describe a complete run".
struct ChoiceExhausted {};

class ChoiceSource {
  public:
    static ChoiceSource scripted(std::vector<std::uint64_t> tape);
    static ChoiceSource seeded(std::uint64_t seed);

    // Next raw natural. Scripted sources throw ChoiceExhausted past the end.
    std::uint64_t next();

    // Every draw handed out so far, in order.
    const std::vector<std::uint64_t>& consumed() const { return consumed_; }

    // For scripted sources: true when the whole tape has been handed out.
    bool fully_consumed() const;

  private:
    ChoiceSource() = default;

    bool scripted_ = false;
    std::vector<std::uint64_t> tape_;
    std::size_t cursor_ = 0;
    std::mt19937_64 engine_;
    std::vector<std::uint64_t> consumed_;
};

// Value domains the adversary picks arguments from.
struct HavocDomains {
    unsigned n_addresses = 4;
    std::vector<U256> amounts;
};

// Decoders from raw draws to model values. Each consumes exactly one draw.
std::uint64_t havoc_nat(ChoiceSource& cs);
bool havoc_bool(ChoiceSource& cs);
Address havoc_address(ChoiceSource& cs, const HavocDomains& dom);
U256 havoc_amount(ChoiceSource& cs, const HavocDomains& dom);
// A havoced message is an arbitrary sender with no attached value.
Msg havoc_msg(ChoiceSource& cs, const HavocDomains& dom);
CallResult havoc_result(ChoiceSource& cs);

} // namespace cwb
