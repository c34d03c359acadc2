// cwb: a small functionally pure EVM interpreter.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/evm/machine.hpp"

#include <algorithm>
#include <utility>

#include "cwb/check.hpp"

namespace cwb::evm {

namespace {

using u128 = unsigned __int128;

// Sentinel for costs no 64-bit gas balance can ever pay, used when an
// operand is too large to even size the memory it asks for.
constexpr u128 kUnpayable = ~static_cast<u128>(0);

struct OpInfo {
    std::string_view name;
    std::uint8_t arity = 0;
    bool pushes = false;
};

const OpInfo* op_info(std::uint8_t op) {
    static const OpInfo kStop{"STOP", 0, false};
    static const OpInfo kAdd{"ADD", 2, false};
    static const OpInfo kIsZero{"ISZERO", 1, false};
    static const OpInfo kPop{"POP", 1, false};
    static const OpInfo kMload{"MLOAD", 1, false};
    static const OpInfo kMstore{"MSTORE", 2, false};
    static const OpInfo kSload{"SLOAD", 1, false};
    static const OpInfo kSstore{"SSTORE", 2, false};
    static const OpInfo kJump{"JUMP", 1, false};
    static const OpInfo kJumpi{"JUMPI", 2, false};
    static const OpInfo kJumpdest{"JUMPDEST", 0, false};
    static const OpInfo kPush1{"PUSH1", 0, true};
    static const OpInfo kDup1{"DUP1", 1, true};
    static const OpInfo kRevert{"REVERT", 2, false};
    switch (op) {
    case OP_STOP: return &kStop;
    case OP_ADD: return &kAdd;
    case OP_ISZERO: return &kIsZero;
    case OP_POP: return &kPop;
    case OP_MLOAD: return &kMload;
    case OP_MSTORE: return &kMstore;
    case OP_SLOAD: return &kSload;
    case OP_SSTORE: return &kSstore;
    case OP_JUMP: return &kJump;
    case OP_JUMPI: return &kJumpi;
    case OP_JUMPDEST: return &kJumpdest;
    case OP_PUSH1: return &kPush1;
    case OP_DUP1: return &kDup1;
    case OP_REVERT: return &kRevert;
    default: return nullptr;
    }
}

U256 read_word(const std::vector<std::uint8_t>& mem, std::uint64_t off) {
    U256 w;
    for (unsigned i = 0; i < 32; ++i) {
        const std::uint64_t b = mem[off + i];
        w.limb[3 - i / 8] |= b << (8 * (7 - (i % 8)));
    }
    return w;
}

void write_word(std::vector<std::uint8_t>& mem, std::uint64_t off, const U256& w) {
    for (unsigned i = 0; i < 32; ++i)
        mem[off + i] = static_cast<std::uint8_t>(w.limb[3 - i / 8] >> (8 * (7 - (i % 8))));
}

// Cost of growing the machine's memory so addr+n is covered, in schedule
// units; kUnpayable when addr does not even fit in an address.
u128 growth_cost(const Ok& m, const U256& addr, u128 n, const GasSchedule& sched) {
    if (!fits_u64(addr))
        return kUnpayable;
    const u128 target = static_cast<u128>(addr.limb[0]) + n;
    const u128 have = m.memory.size();
    if (target <= have)
        return 0;
    const u128 words_have = have / 32;
    const u128 words_want = (target + 31) / 32;
    return (words_want - words_have) * static_cast<u128>(sched.memory_word);
}

// Full price of the instruction `op` in state m. Requires the operand arity
// to be on the stack already.
u128 instruction_cost(const Ok& m, std::uint8_t op, const GasSchedule& sched) {
    const u128 flat = sched.flat[op];
    u128 grow = 0;
    const auto top = [&](std::size_t i) -> const U256& {
        return m.stack[m.stack.size() - 1 - i];
    };
    switch (op) {
    case OP_MLOAD:
    case OP_MSTORE:
        grow = growth_cost(m, top(0), 32, sched);
        break;
    case OP_REVERT: {
        const U256& len = top(1);
        if (!fits_u64(len))
            return kUnpayable;
        grow = growth_cost(m, top(0), static_cast<u128>(len.limb[0]), sched);
        break;
    }
    default:
        break;
    }
    if (grow == kUnpayable)
        return kUnpayable;
    return flat + grow;
}

} // namespace

std::string_view vm_error_name(VmError e) {
    switch (e) {
    case VmError::StackUnderflow: return "STACK_UNDERFLOW";
    case VmError::StackOverflow: return "STACK_OVERFLOW";
    case VmError::OutOfGas: return "OUT_OF_GAS";
    case VmError::InvalidJump: return "INVALID_JUMP";
    case VmError::InvalidOpcode: return "INVALID_OPCODE";
    }
    CWB_CHECK(false);
    return "";
}

bool opcode_supported(std::uint8_t op) {
    return op_info(op) != nullptr;
}

std::string_view opcode_name(std::uint8_t op) {
    const OpInfo* info = op_info(op);
    return info ? info->name : std::string_view("INVALID");
}

GasSchedule GasSchedule::flat_one() {
    GasSchedule g;
    for (std::uint64_t& c : g.flat)
        c = 1;
    g.memory_word = 1;
    return g;
}

const GasSchedule& default_schedule() {
    static const GasSchedule g = GasSchedule::flat_one();
    return g;
}

std::vector<std::uint64_t> compute_jumpdests(const std::vector<std::uint8_t>& code) {
    std::vector<std::uint64_t> dests;
    for (std::uint64_t pc = 0; pc < code.size();) {
        if (code[pc] == OP_JUMPDEST) {
            dests.push_back(pc);
            pc += 1;
        } else if (code[pc] == OP_PUSH1) {
            pc += 2; // the operand byte is data, never a destination
        } else {
            pc += 1;
        }
    }
    return dests;
}

MachineState init(std::vector<std::uint8_t> code, std::uint64_t gas, Storage storage) {
    Ok m;
    m.gas = gas;
    m.pc = 0;
    // Keep the map canonical: an absent key and a zero value are the same
    // observation, so zero entries never live in the map.
    for (auto it = storage.begin(); it != storage.end();) {
        if (it->second.is_zero())
            it = storage.erase(it);
        else
            ++it;
    }
    m.storage = std::move(storage);
    m.jumpdests = compute_jumpdests(code);
    m.code = std::move(code);
    return m;
}

std::optional<std::uint64_t> gas_cost(const Ok& st, const GasSchedule& sched) {
    const std::uint64_t len = st.code.size();
    const std::uint8_t op = st.pc < len ? st.code[st.pc] : OP_STOP;
    const OpInfo* info = op_info(op);
    if (info == nullptr || st.stack.size() < info->arity)
        return std::nullopt;
    const u128 cost = instruction_cost(st, op, sched);
    if (cost > ~static_cast<std::uint64_t>(0))
        return std::nullopt;
    return static_cast<std::uint64_t>(cost);
}

std::vector<std::uint8_t> expand(std::vector<std::uint8_t> memory, std::uint64_t addr,
                                 std::uint64_t n) {
    const u128 target = static_cast<u128>(addr) + n;
    if (target <= memory.size())
        return memory;
    const u128 words = (target + 31) / 32;
    memory.resize(static_cast<std::size_t>(words * 32), 0);
    return memory;
}

MachineState step(MachineState st, const GasSchedule& sched) {
    Ok* live = std::get_if<Ok>(&st);
    if (live == nullptr)
        return st; // halted states are fixpoints
    Ok m = std::move(*live);

    const std::uint64_t len = m.code.size();
    const std::uint8_t op = m.pc < len ? m.code[m.pc] : OP_STOP;
    const OpInfo* info = op_info(op);
    if (info == nullptr)
        return Invalid{VmError::InvalidOpcode};
    if (m.stack.size() < info->arity)
        return Invalid{VmError::StackUnderflow};

    const u128 cost = instruction_cost(m, op, sched);
    if (cost > m.gas)
        return Invalid{VmError::OutOfGas};
    m.gas -= static_cast<std::uint64_t>(cost);

    // Growth was priced and paid, so operands used as addresses fit and the
    // resize below is bounded by what the gas balance could afford.
    const auto pop = [&] {
        U256 v = m.stack.back();
        m.stack.pop_back();
        return v;
    };
    const auto advance = [&](std::uint64_t by) { m.pc = std::min(m.pc + by, len); };

    switch (op) {
    case OP_STOP:
        return Returns{m.gas, {}, std::move(m.storage)};
    case OP_ADD: {
        const U256 a = pop();
        const U256 b = pop();
        m.stack.push_back(wrapping_add(a, b));
        advance(1);
        break;
    }
    case OP_ISZERO: {
        const U256 a = pop();
        m.stack.push_back(a.is_zero() ? U256(1) : U256(0));
        advance(1);
        break;
    }
    case OP_POP:
        pop();
        advance(1);
        break;
    case OP_MLOAD: {
        const U256 loc = pop();
        CWB_CHECK(fits_u64(loc));
        m.memory = expand(std::move(m.memory), loc.limb[0], 32);
        m.stack.push_back(read_word(m.memory, loc.limb[0]));
        advance(1);
        break;
    }
    case OP_MSTORE: {
        const U256 loc = pop();
        const U256 value = pop();
        CWB_CHECK(fits_u64(loc));
        m.memory = expand(std::move(m.memory), loc.limb[0], 32);
        write_word(m.memory, loc.limb[0], value);
        advance(1);
        break;
    }
    case OP_SLOAD: {
        const U256 key = pop();
        const auto it = m.storage.find(key);
        m.stack.push_back(it == m.storage.end() ? U256(0) : it->second);
        advance(1);
        break;
    }
    case OP_SSTORE: {
        const U256 key = pop();
        const U256 value = pop();
        if (value.is_zero())
            m.storage.erase(key);
        else
            m.storage[key] = value;
        advance(1);
        break;
    }
    case OP_JUMP: {
        const U256 dest = pop();
        if (!fits_u64(dest) ||
            !std::binary_search(m.jumpdests.begin(), m.jumpdests.end(), dest.limb[0]))
            return Invalid{VmError::InvalidJump};
        m.pc = dest.limb[0];
        break;
    }
    case OP_JUMPI: {
        const U256 dest = pop();
        const U256 cond = pop();
        if (cond.is_zero()) {
            advance(1); // fall through without judging the target
            break;
        }
        if (!fits_u64(dest) ||
            !std::binary_search(m.jumpdests.begin(), m.jumpdests.end(), dest.limb[0]))
            return Invalid{VmError::InvalidJump};
        m.pc = dest.limb[0];
        break;
    }
    case OP_JUMPDEST:
        advance(1);
        break;
    case OP_PUSH1: {
        if (m.stack.size() >= kStackLimit)
            return Invalid{VmError::StackOverflow};
        const std::uint8_t operand = m.pc + 1 < len ? m.code[m.pc + 1] : 0;
        m.stack.push_back(U256(operand));
        advance(2);
        break;
    }
    case OP_DUP1: {
        if (m.stack.size() >= kStackLimit)
            return Invalid{VmError::StackOverflow};
        m.stack.push_back(m.stack.back());
        advance(1);
        break;
    }
    case OP_REVERT: {
        const U256 off = pop();
        const U256 count = pop();
        CWB_CHECK(fits_u64(off) && fits_u64(count));
        m.memory = expand(std::move(m.memory), off.limb[0], count.limb[0]);
        std::vector<std::uint8_t> data(
            m.memory.begin() + static_cast<std::ptrdiff_t>(off.limb[0]),
            m.memory.begin() + static_cast<std::ptrdiff_t>(off.limb[0] + count.limb[0]));
        return Reverts{m.gas, std::move(data)};
    }
    default:
        CWB_CHECK(false);
    }

    CWB_ENSURE(m.stack.size() <= kStackLimit);
    CWB_ENSURE(m.memory.size() % 32 == 0);
    CWB_ENSURE(m.pc <= len);
    return m;
}

MachineState execute_n(MachineState st, std::uint64_t n, const GasSchedule& sched,
                       std::vector<StepRecord>* trajectory) {
    for (std::uint64_t i = 0; i < n; ++i) {
        const Ok* live = std::get_if<Ok>(&st);
        if (live == nullptr)
            break;
        if (trajectory != nullptr) {
            const std::uint8_t op =
                live->pc < live->code.size() ? live->code[live->pc] : OP_STOP;
            trajectory->push_back(StepRecord{live->pc, op, live->gas, live->stack.size()});
        }
        st = step(std::move(st), sched);
    }
    return st;
}

} // namespace cwb::evm
