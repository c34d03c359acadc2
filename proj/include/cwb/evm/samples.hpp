// cwb: worked bytecode programs and their property checks.
// SPDX-License-Identifier: Apache-2.0
//
// Two small programs exercise the interpreter end to end. The increment
// contract loads slot 0 and adds one, then either stores the result and stops
// or, when the addition wrapped to zero, takes the revert arm; its control flow
// makes a clean biconditional to check. The add program pushes two bytes and
// adds them, small enough to check exhaustively over every input pair.
#pragma once

#include <cstdint>
#include <vector>

#include "cwb/evm/machine.hpp"

namespace cwb::evm {

// Increment-with-overflow-guard. Layout: the revert arm starts at pc 0xa and
// the store arm at the JUMPDEST at pc 0xf, so a step trajectory tells the two
// apart at a glance.
std::vector<std::uint8_t> inc_contract();

// PUSH1 x, PUSH1 y, ADD.
std::vector<std::uint8_t> add_bytes_program(std::uint8_t x, std::uint8_t y);

struct IncRun {
    bool returned = false; // true for RETURNS, false for REVERTS
    U256 final_slot0;      // committed slot 0 when returned
    std::vector<std::uint64_t> pcs; // pc of every executed step, in order
};

// Run the increment contract from storage {0: initial} with ample gas. The
// machine always halts in RETURNS or REVERTS; anything else is a checker bug.
IncRun run_inc(const U256& initial);

// Exhaustive add check over all 65,536 byte pairs: three steps must leave an
// OK machine whose stack top is x + y. Returns the number of failing pairs.
std::uint64_t check_add_bytes();

// Increment biconditional over the boundary set {0, 1, 5, MAX-1, MAX} plus
// `random_count` seeded random words: RETURNS exactly when the initial value
// is below MAX, RETURNS commits initial+1, the revert arm passes pc 0xa and
// never the store arm, and vice versa. Returns the number of failing values.
std::uint64_t check_inc(std::uint64_t random_count, std::uint64_t seed);

} // namespace cwb::evm
