// cwb: worked bytecode programs and their property checks.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/evm/samples.hpp"

#include <algorithm>
#include <random>

#include "cwb/check.hpp"

namespace cwb::evm {

std::vector<std::uint8_t> inc_contract() {
    return {
        OP_PUSH1, 0x00, //  0x0: slot index
        OP_SLOAD,       //  0x2: load slot 0
        OP_PUSH1, 0x01, //  0x3
        OP_ADD,         //  0x5: v + 1, wrapping
        OP_DUP1,        //  0x6: keep a copy for the store
        OP_PUSH1, 0x0f, //  0x7: store-arm address
        OP_JUMPI,       //  0x9: jump unless the sum wrapped to zero
        OP_PUSH1, 0x00, //  0xa: revert arm
        OP_PUSH1, 0x00, //  0xc
        OP_REVERT,      //  0xe
        OP_JUMPDEST,    //  0xf: store arm
        OP_PUSH1, 0x00, // 0x10
        OP_SSTORE,      // 0x12: slot 0 := v + 1
        OP_STOP,        // 0x13
    };
}

std::vector<std::uint8_t> add_bytes_program(std::uint8_t x, std::uint8_t y) {
    return {OP_PUSH1, x, OP_PUSH1, y, OP_ADD};
}

IncRun run_inc(const U256& initial) {
    Storage storage;
    storage[U256(0)] = initial;
    MachineState st = init(inc_contract(), 40000, std::move(storage));
    std::vector<StepRecord> steps;
    st = execute_n(std::move(st), 20, default_schedule(), &steps);

    IncRun out;
    out.pcs.reserve(steps.size());
    for (const StepRecord& s : steps)
        out.pcs.push_back(s.pc);
    if (const Returns* r = std::get_if<Returns>(&st)) {
        out.returned = true;
        const auto it = r->storage.find(U256(0));
        out.final_slot0 = it == r->storage.end() ? U256(0) : it->second;
        return out;
    }
    CWB_CHECK(std::holds_alternative<Reverts>(st));
    out.returned = false;
    return out;
}

std::uint64_t check_add_bytes() {
    std::uint64_t failures = 0;
    for (unsigned x = 0; x < 256; ++x) {
        for (unsigned y = 0; y < 256; ++y) {
            MachineState st = init(add_bytes_program(static_cast<std::uint8_t>(x),
                                                     static_cast<std::uint8_t>(y)),
                                   10, {});
            st = execute_n(std::move(st), 3);
            const Ok* m = std::get_if<Ok>(&st);
            const bool ok = m != nullptr && !m->stack.empty() &&
                            m->stack.back() == U256(static_cast<std::uint64_t>(x + y));
            if (!ok)
                ++failures;
        }
    }
    return failures;
}

namespace {

bool inc_case_holds(const U256& v) {
    const IncRun run = run_inc(v);
    const bool expect_return = !(v == U256::max());
    if (run.returned != expect_return)
        return false;
    const bool saw_revert_arm = std::find(run.pcs.begin(), run.pcs.end(), 0xa) != run.pcs.end();
    const bool saw_store_arm = std::find(run.pcs.begin(), run.pcs.end(), 0xf) != run.pcs.end();
    if (run.returned) {
        if (!(run.final_slot0 == wrapping_add(v, U256(1))))
            return false;
        return saw_store_arm && !saw_revert_arm;
    }
    return saw_revert_arm && !saw_store_arm;
}

} // namespace

std::uint64_t check_inc(std::uint64_t random_count, std::uint64_t seed) {
    std::vector<U256> values = {U256(0), U256(1), U256(5)};
    U256 nearly = U256::max();
    nearly.limb[0] -= 1;
    values.push_back(nearly);
    values.push_back(U256::max());

    std::mt19937_64 rng(seed);
    for (std::uint64_t i = 0; i < random_count; ++i) {
        U256 v;
        for (std::uint64_t& limb : v.limb)
            limb = rng();
        values.push_back(v);
    }

    std::uint64_t failures = 0;
    for (const U256& v : values) {
        if (!inc_case_holds(v))
            ++failures;
    }
    return failures;
}

} // namespace cwb::evm
