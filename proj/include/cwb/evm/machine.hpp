// cwb: a small functionally pure EVM interpreter.
// SPDX-License-Identifier: Apache-2.0
//
// Covers the fourteen opcodes the worked examples need. States are values:
// stepping maps an OK machine to its successor and leaves every other state
// untouched, so executions are trivially replayable and comparable. Each
// step settles in a fixed order: operand arity, then the gas charge (a flat
// unit plus one unit per 32-byte word of memory growth, with the growth
// computed in wide arithmetic so absurd offsets price as unpayable instead
// of overflowing), then the operation itself. Code that runs off the end
// behaves as a priced STOP.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "cwb/u256.hpp"

namespace cwb::evm {

enum class VmError : std::uint8_t {
    StackUnderflow = 0,
    StackOverflow = 1,
    OutOfGas = 2,
    InvalidJump = 3,
    InvalidOpcode = 4,
};

std::string_view vm_error_name(VmError e);

inline constexpr std::size_t kStackLimit = 1024;

// Opcode byte values of the supported subset.
inline constexpr std::uint8_t OP_STOP = 0x00;
inline constexpr std::uint8_t OP_ADD = 0x01;
inline constexpr std::uint8_t OP_ISZERO = 0x15;
inline constexpr std::uint8_t OP_POP = 0x50;
inline constexpr std::uint8_t OP_MLOAD = 0x51;
inline constexpr std::uint8_t OP_MSTORE = 0x52;
inline constexpr std::uint8_t OP_SLOAD = 0x54;
inline constexpr std::uint8_t OP_SSTORE = 0x55;
inline constexpr std::uint8_t OP_JUMP = 0x56;
inline constexpr std::uint8_t OP_JUMPI = 0x57;
inline constexpr std::uint8_t OP_JUMPDEST = 0x5b;
inline constexpr std::uint8_t OP_PUSH1 = 0x60;
inline constexpr std::uint8_t OP_DUP1 = 0x80;
inline constexpr std::uint8_t OP_REVERT = 0xfd;

bool opcode_supported(std::uint8_t op);
std::string_view opcode_name(std::uint8_t op);

using Storage = std::map<U256, U256>;

// A live machine. The jump destination set is derived from the code once at
// construction; it carries no information of its own.
struct Ok {
    std::uint64_t gas = 0;
    std::uint64_t pc = 0;
    std::vector<U256> stack;
    std::vector<std::uint8_t> memory; // length always a multiple of 32
    Storage storage;                  // zero values are never stored
    std::vector<std::uint8_t> code;
    std::vector<std::uint64_t> jumpdests; // sorted

    friend bool operator==(const Ok&, const Ok&) = default;
};

struct Reverts {
    std::uint64_t gas = 0;
    std::vector<std::uint8_t> data;

    friend bool operator==(const Reverts&, const Reverts&) = default;
};

// A normal halt; carries the committed storage so callers can inspect the
// execution's effect.
struct Returns {
    std::uint64_t gas = 0;
    std::vector<std::uint8_t> data;
    Storage storage;

    friend bool operator==(const Returns&, const Returns&) = default;
};

struct Invalid {
    VmError error = VmError::InvalidOpcode;

    friend bool operator==(const Invalid&, const Invalid&) = default;
};

using MachineState = std::variant<Ok, Reverts, Returns, Invalid>;

// Pluggable cost table: a flat per-opcode charge plus a charge per 32-byte
// word of memory growth. The default prices everything at one unit, which
// satisfies the one property the analyses rely on: every step costs gas.
struct GasSchedule {
    std::uint64_t flat[256] = {};
    std::uint64_t memory_word = 1;

    static GasSchedule flat_one();
};

const GasSchedule& default_schedule();

// Jump targets: positions of JUMPDEST bytes that are real instructions, not
// PUSH1 operands.
std::vector<std::uint64_t> compute_jumpdests(const std::vector<std::uint8_t>& code);

MachineState init(std::vector<std::uint8_t> code, std::uint64_t gas, Storage storage);

// Price of the next instruction, including memory growth read from the
// operands in place. Empty when the stack is too shallow to price it.
std::optional<std::uint64_t> gas_cost(const Ok& st, const GasSchedule& sched);

// Grow to the smallest 32-byte multiple covering addr+n; never shrinks.
std::vector<std::uint8_t> expand(std::vector<std::uint8_t> memory, std::uint64_t addr,
                                 std::uint64_t n);

MachineState step(MachineState st, const GasSchedule& sched = default_schedule());

// One line per executed step, recorded before the step runs.
struct StepRecord {
    std::uint64_t pc = 0;
    std::uint8_t opcode = 0; // the implicit trailing STOP records as STOP
    std::uint64_t gas = 0;
    std::size_t stack_depth = 0;
};

MachineState execute_n(MachineState st, std::uint64_t n,
                       const GasSchedule& sched = default_schedule(),
                       std::vector<StepRecord>* trajectory = nullptr);

} // namespace cwb::evm
