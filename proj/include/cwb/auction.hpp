// cwb: open-outcry auction state machine with a ghost history.
// SPDX-License-Identifier: Apache-2.0
//
// Bids escrow ether in the contract; outbid participants withdraw refunds;
// ending the auction pays the beneficiary. Every public method appends
// exactly one (ended, highest_bid) snapshot to a ghost history on return,
// on the Revert path too, so temporal claims (ended is monotone, the highest
// bid never moves backwards and freezes once ended) become local checks over
// adjacent history entries.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cwb/core.hpp"

namespace cwb {

struct HistoryEntry {
    bool ended = false;
    U256 highest_bid;

    friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct AuctionState {
    Address beneficiary;
    U256 highest_bid;
    std::optional<Address> highest_bidder;
    bool ended = false;
    U256 eth_balance;
    // Escrowed amounts owed to outbid participants.
    BalanceMap pending_refunds;
    // Ghost: one snapshot per public-method return, plus one at construction.
    std::vector<HistoryEntry> history;

    friend bool operator==(const AuctionState&, const AuctionState&) = default;
};

// Per-account ether holdings, indexed by address.
using EthLedger = std::array<U256, kMaxAddresses>;

AuctionState new_auction(Address beneficiary, const Msg& msg);

bool bid_allowed(const AuctionState& st, const Msg& msg, Gas gas);
bool auction_end_allowed(const AuctionState& st, Gas gas);
bool withdraw_allowed(const AuctionState& st, const Msg& msg, Gas gas);

// A successful bid escrows msg.value, queues a refund for the outbid leader
// and records the new leader.
MethodResult bid(AuctionState& st, EthLedger& eth, const Msg& msg, Gas gas);

// Ending pays the beneficiary the winning bid and freezes the auction.
MethodResult auction_end(AuctionState& st, EthLedger& eth, const Msg& msg, Gas gas);

// Withdraw pays the caller's queued refund in full.
MethodResult withdraw(AuctionState& st, EthLedger& eth, const Msg& msg, Gas gas);

// True when `next` may follow `prev` in a history: ended never clears, the
// highest bid never decreases, and it stays put once the auction has ended.
bool history_step_ok(const HistoryEntry& prev, const HistoryEntry& next);

// Equality of the executable auction state, ignoring the ghost history.
bool auction_exec_equal(const AuctionState& a, const AuctionState& b);

} // namespace cwb
