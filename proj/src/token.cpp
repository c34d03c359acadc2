// cwb: minting token state machine.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/token.hpp"

#include "cwb/check.hpp"

namespace cwb {

bool token_invariant(const TokenState& st) {
    return st.total_amount == sum_values(st.balances);
}

std::string_view conservation_class_name(ConservationClass c) {
    switch (c) {
    case ConservationClass::Conserved: return "conserved";
    case ConservationClass::Destroyed: return "destroyed";
    case ConservationClass::Created: return "created";
    }
    CWB_CHECK(false);
    return "";
}

ConservationClass conservation_class(const TokenState& st) {
    const WideNat sum = sum_values(st.balances);
    if (st.total_amount < sum)
        return ConservationClass::Created;
    if (sum < st.total_amount)
        return ConservationClass::Destroyed;
    return ConservationClass::Conserved;
}

TokenState new_token(const Msg& msg) {
    TokenState st;
    st.minter = msg.sender;
    st.eth_balance = msg.value;
    return st;
}

namespace {

// Recipient-side overflow clause: absent recipients can always be credited;
// present ones only while the credited balance stays within 256 bits.
bool credit_fits(const TokenState& st, Address to, const U256& amount) {
    if (!st.balances.contains(to))
        return true;
    return checked_add(st.balances.get(to), amount).has_value();
}

void credit(TokenState& st, Address to, const U256& amount) {
    const auto credited = checked_add(st.balances.get_or_zero(to), amount);
    CWB_CHECK(credited.has_value());
    st.balances.set(to, *credited);
}

// Attached ether joins the contract balance on success. Total ether in any
// well-formed scenario stays far below 2^256, so overflow here is a bug.
void accept_value(TokenState& st, const Msg& msg) {
    const auto held = checked_add(st.eth_balance, msg.value);
    CWB_CHECK(held.has_value());
    st.eth_balance = *held;
}

} // namespace

bool transfer_allowed(const TokenState& st, Address from, Address to, const U256& amount,
                      const Msg& msg, Gas gas, const Semantics& sem) {
    return st.balances.contains(from) && st.balances.get(from) >= amount && msg.sender == from &&
           gas >= 1 && credit_fits(st, to, amount) && (!sem.strict_nonpayable || msg.value.is_zero());
}

bool mint_allowed(const TokenState& st, Address to, const U256& amount, const Msg& msg, Gas gas,
                  const Semantics& sem) {
    return msg.sender == st.minter && gas >= 1 && credit_fits(st, to, amount) &&
           (!sem.strict_nonpayable || msg.value.is_zero());
}

MethodResult transfer(TokenState& st, Address from, Address to, const U256& amount, const Msg& msg,
                      Gas gas, const Semantics& sem) {
    if (!transfer_allowed(st, from, to, amount, msg, gas, sem))
        return {revert_gas(gas), CallResult::revert()};
    credit(st, to, amount);
    const auto debited = checked_sub(st.balances.get(from), amount);
    CWB_CHECK(debited.has_value()); // guard guarantees funds even after a self-credit
    st.balances.set(from, *debited);
    accept_value(st, msg);
    return {gas - 1, CallResult::success()};
}

MethodResult mint(TokenState& st, Address to, const U256& amount, const Msg& msg, Gas gas,
                  const Semantics& sem) {
    if (!mint_allowed(st, to, amount, msg, gas, sem))
        return {revert_gas(gas), CallResult::revert()};
    credit(st, to, amount);
    st.total_amount.add(amount);
    accept_value(st, msg);
    return {gas - 1, CallResult::success()};
}

NotifyPrologue notify_prologue(TokenState& st, TokenVariant variant, Address from, Address to,
                               const U256& amount, const Msg& msg) {
    CWB_REQUIRE(variant != TokenVariant::Plain);
    credit(st, to, amount);
    NotifyPrologue pro;
    if (variant == TokenVariant::NotifySafe) {
        const auto debited = checked_sub(st.balances.get(from), amount);
        CWB_CHECK(debited.has_value());
        st.balances.set(from, *debited);
    } else {
        // Capture the debit result now; writing it after the external call is
        // the vulnerability under study.
        const auto stale = checked_sub(st.balances.get(from), amount);
        CWB_CHECK(stale.has_value());
        pro.stale_write = true;
        pro.stale_value = *stale;
    }
    accept_value(st, msg);
    return pro;
}

void notify_epilogue(TokenState& st, const NotifyPrologue& pro, Address from) {
    if (pro.stale_write)
        st.balances.set(from, pro.stale_value);
}

} // namespace cwb
