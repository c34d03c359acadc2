// cwb: open-outcry auction state machine.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/auction.hpp"

#include "cwb/check.hpp"

namespace cwb {

namespace {

void snapshot(AuctionState& st) {
    st.history.push_back(HistoryEntry{st.ended, st.highest_bid});
}

MethodResult revert_and_snapshot(AuctionState& st, Gas gas) {
    snapshot(st);
    return {revert_gas(gas), CallResult::revert()};
}

void accept_value(AuctionState& st, const Msg& msg) {
    const auto held = checked_add(st.eth_balance, msg.value);
    CWB_CHECK(held.has_value());
    st.eth_balance = *held;
}

void pay_out(AuctionState& st, EthLedger& eth, Address to, const U256& amount) {
    const auto remaining = checked_sub(st.eth_balance, amount);
    CWB_CHECK(remaining.has_value()); // escrow accounting guarantees coverage
    st.eth_balance = *remaining;
    const auto credited = checked_add(eth[to.index], amount);
    CWB_CHECK(credited.has_value());
    eth[to.index] = *credited;
}

} // namespace

AuctionState new_auction(Address beneficiary, const Msg& msg) {
    AuctionState st;
    st.beneficiary = beneficiary;
    st.eth_balance = msg.value;
    snapshot(st);
    return st;
}

bool bid_allowed(const AuctionState& st, const Msg& msg, Gas gas) {
    return !st.ended && msg.value > st.highest_bid && gas >= 1;
}

bool auction_end_allowed(const AuctionState& st, Gas gas) {
    return !st.ended && gas >= 1;
}

bool withdraw_allowed(const AuctionState& st, const Msg& msg, Gas gas) {
    return st.pending_refunds.contains(msg.sender) && gas >= 1;
}

MethodResult bid(AuctionState& st, EthLedger& eth, const Msg& msg, Gas gas) {
    (void)eth; // bids only move ether into escrow; the ledger debit is the
               // transaction layer's job
    if (!bid_allowed(st, msg, gas))
        return revert_and_snapshot(st, gas);
    if (st.highest_bidder.has_value()) {
        const auto owed =
            checked_add(st.pending_refunds.get_or_zero(*st.highest_bidder), st.highest_bid);
        CWB_CHECK(owed.has_value());
        st.pending_refunds.set(*st.highest_bidder, *owed);
    }
    st.highest_bidder = msg.sender;
    st.highest_bid = msg.value;
    accept_value(st, msg);
    snapshot(st);
    return {gas - 1, CallResult::success()};
}

MethodResult auction_end(AuctionState& st, EthLedger& eth, const Msg& msg, Gas gas) {
    if (!auction_end_allowed(st, gas))
        return revert_and_snapshot(st, gas);
    accept_value(st, msg);
    st.ended = true;
    pay_out(st, eth, st.beneficiary, st.highest_bid);
    snapshot(st);
    return {gas - 1, CallResult::success()};
}

MethodResult withdraw(AuctionState& st, EthLedger& eth, const Msg& msg, Gas gas) {
    if (!withdraw_allowed(st, msg, gas))
        return revert_and_snapshot(st, gas);
    accept_value(st, msg);
    const U256 owed = st.pending_refunds.get(msg.sender);
    st.pending_refunds.erase(msg.sender);
    pay_out(st, eth, msg.sender, owed);
    snapshot(st);
    return {gas - 1, CallResult::success()};
}

bool auction_exec_equal(const AuctionState& a, const AuctionState& b) {
    return a.beneficiary == b.beneficiary && a.highest_bid == b.highest_bid &&
           a.highest_bidder == b.highest_bidder && a.ended == b.ended &&
           a.eth_balance == b.eth_balance && a.pending_refunds == b.pending_refunds;
}

bool history_step_ok(const HistoryEntry& prev, const HistoryEntry& next) {
    if (prev.ended && !next.ended)
        return false; // ended must be monotone
    if (prev.ended && next.highest_bid != prev.highest_bid)
        return false; // the winning bid is frozen after the end
    if (!prev.ended && next.highest_bid < prev.highest_bid)
        return false; // open-phase bids never decrease
    return true;
}

} // namespace cwb
