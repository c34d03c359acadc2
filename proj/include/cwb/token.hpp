// cwb: minting token state machine with revert semantics.
// SPDX-License-Identifier: Apache-2.0
//
// Three variants share one guard language. Plain has no external calls.
// NotifySafe completes all balance writes before notifying the recipient.
// NotifyVulnerable notifies while the sender debit is still pending and then
// writes back a stale value, the classic re-entrancy bug.
//
// Every method either applies all of its effects and returns Success, or
// leaves the state bit-identical and returns Revert. Success holds exactly
// when the guard holds: callers can rely on the biconditional.
#pragma once

#include <cstdint>
#include <string_view>

#include "cwb/core.hpp"

namespace cwb {

enum class TokenVariant : std::uint8_t { Plain = 0, NotifySafe = 1, NotifyVulnerable = 2 };

struct TokenState {
    Address minter;
    BalanceMap balances;
    U256 eth_balance;
    // Ghost: sum of all amounts ever minted, as an unbounded natural.
    WideNat total_amount;

    friend bool operator==(const TokenState&, const TokenState&) = default;
};

// The conservation invariant: the ghost mint total equals the live balance
// sum. Checked at construction exit, method exits and external-call entries.
bool token_invariant(const TokenState& st);

// How a state relates to the ghost total when the invariant breaks: supply
// appearing from nowhere ranks above supply vanishing, which ranks above
// exact conservation. Witness selection and shrinking compare this class.
enum class ConservationClass : std::uint8_t { Conserved = 0, Destroyed = 1, Created = 2 };

std::string_view conservation_class_name(ConservationClass c);
ConservationClass conservation_class(const TokenState& st);

// Fresh token: the creator becomes the write-once minter, no balances exist
// yet and the ghost total starts at zero.
TokenState new_token(const Msg& msg);

// Guard predicates, exposed so tests can check the Success biconditional.
bool transfer_allowed(const TokenState& st, Address from, Address to, const U256& amount,
                      const Msg& msg, Gas gas, const Semantics& sem);
bool mint_allowed(const TokenState& st, Address to, const U256& amount, const Msg& msg, Gas gas,
                  const Semantics& sem);

// Plain transfer: credit the recipient, then debit the sender reading the
// sender balance at debit time, so a self-transfer nets to zero.
MethodResult transfer(TokenState& st, Address from, Address to, const U256& amount, const Msg& msg,
                      Gas gas, const Semantics& sem);

// Mint new supply to one recipient; only the minter may call.
MethodResult mint(TokenState& st, Address to, const U256& amount, const Msg& msg, Gas gas,
                  const Semantics& sem);

// The write sequences of the notify variants, split around the external call
// so the adversarial-call driver can interleave. The prologue applies every
// balance write that happens before the notification; the epilogue applies
// what happens after it.
//
// NotifySafe: prologue = credit + debit, epilogue = nothing.
// NotifyVulnerable: prologue = credit only, and stale_debit captures the
// sender balance net of the amount as of that moment; the epilogue blindly
// writes that captured value back, clobbering any re-entrant updates.
struct NotifyPrologue {
    bool stale_write = false; // epilogue must write stale_value to `from`
    U256 stale_value;
};

NotifyPrologue notify_prologue(TokenState& st, TokenVariant variant, Address from, Address to,
                               const U256& amount, const Msg& msg);
void notify_epilogue(TokenState& st, const NotifyPrologue& pro, Address from);

} // namespace cwb
