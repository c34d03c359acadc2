// cwb: run configuration, traces, reports and their JSON forms.
// SPDX-License-Identifier: Apache-2.0
//
// A trace is a complete, self-contained, replayable record of one run: the
// configuration, the transaction sequence, the consumed choice tape, every
// call frame with its checkpoint outcomes and state hash, and the first
// check violation if any. Reports summarize whole explorations. Files carry
// no timestamps or machine identity: equal runs serialize byte-identically.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwb/choice.hpp"
#include "cwb/core.hpp"
#include "cwb/world.hpp"

namespace cwb {

using json = nlohmann::json;

enum class MethodId : std::uint8_t {
    Transfer = 0,
    Mint = 1,
    TransferNotify = 2,
    Bid = 3,
    AuctionEnd = 4,
    Withdraw = 5,
};

std::string_view method_name(MethodId m);
std::optional<MethodId> method_from_name(std::string_view name);

enum class FrameKind : std::uint8_t {
    Transaction = 0, // top-level call made by an account
    Reentrant = 1,   // contract method re-entered from adversarial code
    External = 2,    // adversarial environment frame
};

enum class ViolationKind : std::uint8_t {
    InvariantAtBoundary = 0,
    GasContract = 1,
    RevertPurity = 2,
    HistoryMonotonicity = 3,
};

std::string_view violation_kind_name(ViolationKind k);

// One top-level call: who calls which method with which arguments, how much
// ether rides along and the gas budget. Unused argument fields stay zero.
struct Transaction {
    Address caller;
    MethodId method = MethodId::Transfer;
    Address from;
    Address to;
    U256 amount;
    U256 value;
    Gas gas = 0;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Frame {
    std::uint16_t depth = 0;
    FrameKind kind = FrameKind::Transaction;
    std::optional<MethodId> method; // empty for external frames
    json args = json::object();
    Gas gas_in = 0;
    Gas gas_out = 0;
    CallResult result;
    // Conservation checkpoint outcomes; empty where the check does not apply.
    std::optional<bool> ginv_before;
    std::optional<bool> ginv_after;
    std::uint64_t state_hash_after = 0;
};

struct Violation {
    ViolationKind kind = ViolationKind::InvariantAtBoundary;
    std::int64_t frame = -1; // index into the trace's frame list
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct SetupMint {
    Address to;
    U256 amount;

    friend bool operator==(const SetupMint&, const SetupMint&) = default;
};

struct RunConfig {
    ModelId model = ModelId::TokenNotifySafe;
    unsigned n_addresses = 4;
    std::vector<U256> amounts = {U256(0), U256(1), U256(2), U256::max()};
    Gas gas_budget = 6;
    unsigned max_transactions = 3;
    // Enumeration cap on each raw draw; domains larger than this are cut off
    // and the report is marked incomplete.
    unsigned max_choice_value = 6;
    unsigned workers = 1;
    unsigned max_violation_traces = 32;
    U256 gas_price;
    Semantics semantics;
    std::optional<SetupMint> setup_mint;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    HavocDomains domains() const { return HavocDomains{n_addresses, amounts}; }
};

struct Trace {
    std::string version = "1";
    RunConfig config;
    std::vector<Transaction> transactions;
    std::vector<std::uint64_t> choices;
    std::vector<Frame> frames;
    std::optional<Violation> violation;
};

// Exploration / fuzzing summary. Counter fields that can exceed 64 bits are
// carried as decimal strings.
struct ReportStats {
    std::uint64_t worlds = 0;
    std::uint64_t transactions_explored = 0;
    std::string branches = "0";
    std::string frames_total = "0";
    std::uint64_t invariant_checks = 0;
    std::uint64_t gas_checks = 0;
    std::uint64_t purity_checks = 0;
    std::uint64_t history_checks = 0;
};

struct ViolationRecord {
    Violation violation;
    Trace witness;
};

struct Report {
    std::string version = "1";
    std::string mode; // "explore" or "fuzz"
    RunConfig config;
    ReportStats stats;
    std::uint64_t violating_runs = 0;
    std::vector<ViolationRecord> violations; // capped at max_violation_traces
    bool complete = true;
};

std::string u128_to_string(unsigned __int128 v);

// JSON round-trips. Parsing throws ConfigError with a readable message.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

json to_json(const RunConfig& c);
RunConfig run_config_from_json(const json& j);
json to_json(const Transaction& t);
Transaction transaction_from_json(const json& j);
json to_json(const Frame& f);
Frame frame_from_json(const json& j);
json to_json(const Violation& v);
Violation violation_from_json(const json& j);
json to_json(const Trace& t);
Trace trace_from_json(const json& j);
json to_json(const Report& r);

std::string dump_canonical(const json& j);

Trace load_trace_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

} // namespace cwb
