// cwb: machine worlds, canonical serialization and hashing.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/world.hpp"

#include "cwb/check.hpp"

namespace cwb {

std::string_view model_id_name(ModelId id) {
    switch (id) {
    case ModelId::TokenPlain: return "token-plain";
    case ModelId::TokenNotifySafe: return "token-notify-safe";
    case ModelId::TokenNotifyVuln: return "token-notify-vuln";
    case ModelId::Auction: return "auction";
    }
    CWB_CHECK(false);
    return "";
}

std::optional<ModelId> model_id_from_name(std::string_view name) {
    for (const ModelId id : {ModelId::TokenPlain, ModelId::TokenNotifySafe,
                             ModelId::TokenNotifyVuln, ModelId::Auction}) {
        if (model_id_name(id) == name)
            return id;
    }
    return std::nullopt;
}

bool is_token_model(ModelId id) {
    return id != ModelId::Auction;
}

TokenVariant token_variant_of(ModelId id) {
    switch (id) {
    case ModelId::TokenPlain: return TokenVariant::Plain;
    case ModelId::TokenNotifySafe: return TokenVariant::NotifySafe;
    case ModelId::TokenNotifyVuln: return TokenVariant::NotifyVulnerable;
    case ModelId::Auction: break;
    }
    CWB_CHECK(false);
    return TokenVariant::Plain;
}

TokenState& token_of(World& w) {
    CWB_REQUIRE(std::holds_alternative<TokenState>(w.contract));
    return std::get<TokenState>(w.contract);
}

const TokenState& token_of(const World& w) {
    CWB_REQUIRE(std::holds_alternative<TokenState>(w.contract));
    return std::get<TokenState>(w.contract);
}

AuctionState& auction_of(World& w) {
    CWB_REQUIRE(std::holds_alternative<AuctionState>(w.contract));
    return std::get<AuctionState>(w.contract);
}

const AuctionState& auction_of(const World& w) {
    CWB_REQUIRE(std::holds_alternative<AuctionState>(w.contract));
    return std::get<AuctionState>(w.contract);
}

namespace {

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) {
    out.push_back(v);
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u256(std::vector<std::uint8_t>& out, const U256& v) {
    for (const std::uint64_t l : v.limb)
        put_u64(out, l);
}

void put_wide(std::vector<std::uint8_t>& out, const WideNat& v) {
    for (const std::uint64_t l : v.limb)
        put_u64(out, l);
}

void put_balances(std::vector<std::uint8_t>& out, const BalanceMap& m) {
    put_u8(out, m.present);
    for (unsigned i = 0; i < kMaxAddresses; ++i) {
        if ((m.present >> i) & 1u)
            put_u256(out, m.value[i]);
    }
}

void put_token(std::vector<std::uint8_t>& out, const TokenState& st) {
    put_u8(out, 0); // contract tag
    put_u8(out, st.minter.index);
    put_balances(out, st.balances);
    put_u256(out, st.eth_balance);
    put_wide(out, st.total_amount);
}

void put_auction(std::vector<std::uint8_t>& out, const AuctionState& st, bool include_history) {
    put_u8(out, 1); // contract tag
    put_u8(out, st.beneficiary.index);
    put_u256(out, st.highest_bid);
    put_u8(out, st.highest_bidder ? 1 : 0);
    put_u8(out, st.highest_bidder ? st.highest_bidder->index : 0);
    put_u8(out, st.ended ? 1 : 0);
    put_u256(out, st.eth_balance);
    put_balances(out, st.pending_refunds);
    if (include_history) {
        put_u64(out, st.history.size());
        for (const HistoryEntry& e : st.history) {
            put_u8(out, e.ended ? 1 : 0);
            put_u256(out, e.highest_bid);
        }
    }
}

} // namespace

void serialize_world(const World& w, std::vector<std::uint8_t>& out, bool include_history) {
    put_u8(out, w.n_addresses);
    for (unsigned i = 0; i < w.n_addresses; ++i)
        put_u256(out, w.account_eth[i]);
    if (std::holds_alternative<TokenState>(w.contract))
        put_token(out, std::get<TokenState>(w.contract));
    else
        put_auction(out, std::get<AuctionState>(w.contract), include_history);
}

std::vector<std::uint8_t> world_exec_key(const World& w) {
    std::vector<std::uint8_t> out;
    serialize_world(w, out, /*include_history=*/false);
    return out;
}

void serialize_token_state(const TokenState& st, std::vector<std::uint8_t>& out) {
    put_token(out, st);
}

std::uint64_t fnv1a_64(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t world_hash(const World& w) {
    std::vector<std::uint8_t> bytes;
    serialize_world(w, bytes, /*include_history=*/true);
    return fnv1a_64(bytes.data(), bytes.size());
}

} // namespace cwb
