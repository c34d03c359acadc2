// cwb: machine worlds, canonical serialization and hashing.
// SPDX-License-Identifier: Apache-2.0
//
// A world is the full machine state between transactions: per-account ether
// plus the deployed contract instance. Worlds serialize to a canonical byte
// string (fields in declaration order, balance maps in ascending address
// order) which backs state hashing, dedup keys and purity snapshots, so two
// equal worlds always produce identical bytes.
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "cwb/auction.hpp"
#include "cwb/core.hpp"
#include "cwb/token.hpp"

namespace cwb {

enum class ModelId : std::uint8_t {
    TokenPlain = 0,
    TokenNotifySafe = 1,
    TokenNotifyVuln = 2,
    Auction = 3,
};

std::string_view model_id_name(ModelId id);
std::optional<ModelId> model_id_from_name(std::string_view name);
bool is_token_model(ModelId id);
TokenVariant token_variant_of(ModelId id);

struct World {
    std::uint8_t n_addresses = 4;
    EthLedger account_eth{};
    std::variant<TokenState, AuctionState> contract;

    friend bool operator==(const World&, const World&) = default;
};

TokenState& token_of(World& w);
const TokenState& token_of(const World& w);
AuctionState& auction_of(World& w);
const AuctionState& auction_of(const World& w);

// Canonical byte serialization. The execution key leaves out the auction's
// ghost history: histories are write-only bookkeeping, so worlds that differ
// only there have identical futures and may share one exploration node. The
// token's ghost mint total stays in: the conservation check reads it.
void serialize_world(const World& w, std::vector<std::uint8_t>& out, bool include_history);

std::vector<std::uint8_t> world_exec_key(const World& w);

// Canonical bytes of one token state alone; the exhaustive engine uses this
// to intern the states reached inside adversarial calls.
void serialize_token_state(const TokenState& st, std::vector<std::uint8_t>& out);

std::uint64_t fnv1a_64(const std::uint8_t* data, std::size_t n);

// Hash over the full serialization, history included: replay compares these
// per frame, so ghost drift is caught too.
std::uint64_t world_hash(const World& w);

} // namespace cwb
