// cwb: trace and report JSON round-trips.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/trace.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "cwb/check.hpp"

namespace cwb {

std::string_view method_name(MethodId m) {
    switch (m) {
    case MethodId::Transfer: return "transfer";
    case MethodId::Mint: return "mint";
    case MethodId::TransferNotify: return "transfer-notify";
    case MethodId::Bid: return "bid";
    case MethodId::AuctionEnd: return "auction-end";
    case MethodId::Withdraw: return "withdraw";
    }
    CWB_CHECK(false);
    return "";
}

std::optional<MethodId> method_from_name(std::string_view name) {
    for (const MethodId m : {MethodId::Transfer, MethodId::Mint, MethodId::TransferNotify,
                             MethodId::Bid, MethodId::AuctionEnd, MethodId::Withdraw}) {
        if (method_name(m) == name)
            return m;
    }
    return std::nullopt;
}

std::string_view violation_kind_name(ViolationKind k) {
    switch (k) {
    case ViolationKind::InvariantAtBoundary: return "invariant-at-boundary";
    case ViolationKind::GasContract: return "gas-contract";
    case ViolationKind::RevertPurity: return "revert-purity";
    case ViolationKind::HistoryMonotonicity: return "history-monotonicity";
    }
    CWB_CHECK(false);
    return "";
}

namespace {

std::optional<ViolationKind> violation_kind_from_name(std::string_view name) {
    for (const ViolationKind k :
         {ViolationKind::InvariantAtBoundary, ViolationKind::GasContract,
          ViolationKind::RevertPurity, ViolationKind::HistoryMonotonicity}) {
        if (violation_kind_name(k) == name)
            return k;
    }
    return std::nullopt;
}

std::string_view frame_kind_name(FrameKind k) {
    switch (k) {
    case FrameKind::Transaction: return "transaction";
    case FrameKind::Reentrant: return "reentrant";
    case FrameKind::External: return "external";
    }
    CWB_CHECK(false);
    return "";
}

std::optional<FrameKind> frame_kind_from_name(std::string_view name) {
    for (const FrameKind k : {FrameKind::Transaction, FrameKind::Reentrant, FrameKind::External}) {
        if (frame_kind_name(k) == name)
            return k;
    }
    return std::nullopt;
}

[[noreturn]] void bad(const std::string& what) {
    throw ConfigError(what);
}

const json& field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end())
        bad(std::string("missing field \"") + key + "\"");
    return *it;
}

U256 u256_field(const json& j, const char* key) {
    const json& f = field(j, key);
    if (!f.is_string())
        bad(std::string("field \"") + key + "\" must be a decimal string");
    const auto v = u256_from_dec(f.get<std::string>());
    if (!v)
        bad(std::string("field \"") + key + "\" is not a valid 256-bit decimal");
    return *v;
}

std::uint64_t uint_field(const json& j, const char* key) {
    const json& f = field(j, key);
    if (!f.is_number_unsigned())
        bad(std::string("field \"") + key + "\" must be a non-negative integer");
    return f.get<std::uint64_t>();
}

bool bool_field(const json& j, const char* key) {
    const json& f = field(j, key);
    if (!f.is_boolean())
        bad(std::string("field \"") + key + "\" must be a boolean");
    return f.get<bool>();
}

std::string string_field(const json& j, const char* key) {
    const json& f = field(j, key);
    if (!f.is_string())
        bad(std::string("field \"") + key + "\" must be a string");
    return f.get<std::string>();
}

Address address_field(const json& j, const char* key, unsigned n_addresses) {
    const std::uint64_t idx = uint_field(j, key);
    if (idx >= n_addresses)
        bad(std::string("field \"") + key + "\" is out of the address range");
    return Address{static_cast<std::uint8_t>(idx), false};
}

std::string hash_to_hex(std::uint64_t h) {
    static const char* hexdig = "0123456789abcdef";
    std::string out = "0x";
    for (int shift = 60; shift >= 0; shift -= 4)
        out.push_back(hexdig[(h >> shift) & 0xf]);
    return out;
}

std::uint64_t hash_from_hex(const std::string& s) {
    if (s.size() != 18 || s[0] != '0' || s[1] != 'x')
        bad("state hash must be a 0x-prefixed 16-digit hex string");
    std::uint64_t h = 0;
    for (std::size_t i = 2; i < s.size(); ++i) {
        const char c = s[i];
        unsigned nib = 0;
        if (c >= '0' && c <= '9')
            nib = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f')
            nib = static_cast<unsigned>(c - 'a') + 10;
        else
            bad("state hash must be lowercase hex");
        h = (h << 4) | nib;
    }
    return h;
}

} // namespace

std::string u128_to_string(unsigned __int128 v) {
    if (v == 0)
        return "0";
    std::string digits;
    while (v != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return std::string(digits.rbegin(), digits.rend());
}

json to_json(const RunConfig& c) {
    json amounts = json::array();
    for (const U256& a : c.amounts)
        amounts.push_back(to_dec_string(a));
    json setup;
    if (c.setup_mint) {
        setup = json{{"to", c.setup_mint->to.index}, {"amount", to_dec_string(c.setup_mint->amount)}};
    } else {
        setup = nullptr;
    }
    return json{
        {"model", std::string(model_id_name(c.model))},
        {"addresses", c.n_addresses},
        {"amounts", amounts},
        {"gas_budget", c.gas_budget},
        {"max_transactions", c.max_transactions},
        {"max_choice_value", c.max_choice_value},
        {"max_violation_traces", c.max_violation_traces},
        {"gas_price", to_dec_string(c.gas_price)},
        {"semantics",
         json{{"literal_gas_reset", c.semantics.literal_gas_reset},
              {"propagate_external_failure", c.semantics.propagate_external_failure},
              {"strict_nonpayable", c.semantics.strict_nonpayable}}},
        {"setup_mint", setup},
    };
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known,
                         const char* what) {
    for (const auto& item : j.items()) {
        bool found = false;
        for (const std::string_view k : known) {
            if (item.key() == k) {
                found = true;
                break;
            }
        }
        if (!found)
            bad(std::string("unknown ") + what + " key \"" + item.key() + "\"");
    }
}

} // namespace

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object())
        bad("config must be a JSON object");
    reject_unknown_keys(j,
                        {"model", "addresses", "amounts", "gas_budget", "max_transactions",
                         "max_choice_value", "max_violation_traces", "gas_price", "semantics",
                         "setup_mint"},
                        "config");
    RunConfig c;
    const auto model = model_id_from_name(string_field(j, "model"));
    if (!model)
        bad("unknown model id");
    c.model = *model;
    c.n_addresses = static_cast<unsigned>(uint_field(j, "addresses"));
    if (c.n_addresses < 1 || c.n_addresses > kMaxAddresses)
        bad("addresses must be between 1 and 8");
    const json& amounts = field(j, "amounts");
    if (!amounts.is_array() || amounts.empty())
        bad("amounts must be a non-empty array of decimal strings");
    c.amounts.clear();
    for (const json& a : amounts) {
        if (!a.is_string())
            bad("amounts entries must be decimal strings");
        const auto v = u256_from_dec(a.get<std::string>());
        if (!v)
            bad("amounts entry is not a valid 256-bit decimal");
        c.amounts.push_back(*v);
    }
    c.gas_budget = uint_field(j, "gas_budget");
    c.max_transactions = static_cast<unsigned>(uint_field(j, "max_transactions"));
    c.max_choice_value = static_cast<unsigned>(uint_field(j, "max_choice_value"));
    if (c.max_choice_value < 2)
        bad("max_choice_value must be at least 2");
    c.max_violation_traces = static_cast<unsigned>(uint_field(j, "max_violation_traces"));
    c.gas_price = u256_field(j, "gas_price");
    const json& sem = field(j, "semantics");
    reject_unknown_keys(sem, {"literal_gas_reset", "propagate_external_failure", "strict_nonpayable"},
                        "semantics");
    c.semantics.literal_gas_reset = bool_field(sem, "literal_gas_reset");
    c.semantics.propagate_external_failure = bool_field(sem, "propagate_external_failure");
    c.semantics.strict_nonpayable = bool_field(sem, "strict_nonpayable");
    const json& setup = field(j, "setup_mint");
    if (!setup.is_null()) {
        reject_unknown_keys(setup, {"to", "amount"}, "setup_mint");
        SetupMint sm;
        sm.to = address_field(setup, "to", c.n_addresses);
        sm.amount = u256_field(setup, "amount");
        c.setup_mint = sm;
    }
    return c;
}

json to_json(const Transaction& t) {
    json j{
        {"caller", t.caller.index},
        {"method", std::string(method_name(t.method))},
        {"value", to_dec_string(t.value)},
        {"gas", t.gas},
    };
    switch (t.method) {
    case MethodId::Transfer:
    case MethodId::TransferNotify:
        j["from"] = t.from.index;
        j["to"] = t.to.index;
        j["amount"] = to_dec_string(t.amount);
        break;
    case MethodId::Mint:
        j["to"] = t.to.index;
        j["amount"] = to_dec_string(t.amount);
        break;
    case MethodId::Bid:
    case MethodId::AuctionEnd:
    case MethodId::Withdraw:
        break;
    }
    return j;
}

Transaction transaction_from_json(const json& j) {
    Transaction t;
    const auto m = method_from_name(string_field(j, "method"));
    if (!m)
        bad("unknown method name in transaction");
    t.method = *m;
    t.caller = address_field(j, "caller", kMaxAddresses);
    t.value = u256_field(j, "value");
    t.gas = uint_field(j, "gas");
    switch (t.method) {
    case MethodId::Transfer:
    case MethodId::TransferNotify:
        t.from = address_field(j, "from", kMaxAddresses);
        t.to = address_field(j, "to", kMaxAddresses);
        t.amount = u256_field(j, "amount");
        break;
    case MethodId::Mint:
        t.to = address_field(j, "to", kMaxAddresses);
        t.amount = u256_field(j, "amount");
        break;
    case MethodId::Bid:
    case MethodId::AuctionEnd:
    case MethodId::Withdraw:
        break;
    }
    return t;
}

json to_json(const Frame& f) {
    json j{
        {"depth", f.depth},
        {"kind", std::string(frame_kind_name(f.kind))},
        {"args", f.args},
        {"gas_in", f.gas_in},
        {"gas_out", f.gas_out},
        {"result", f.result.ok() ? "success" : "revert"},
        {"state_hash_after", hash_to_hex(f.state_hash_after)},
    };
    j["method"] = f.method ? json(std::string(method_name(*f.method))) : json(nullptr);
    j["ginv_before"] = f.ginv_before ? json(*f.ginv_before) : json(nullptr);
    j["ginv_after"] = f.ginv_after ? json(*f.ginv_after) : json(nullptr);
    return j;
}

Frame frame_from_json(const json& j) {
    Frame f;
    f.depth = static_cast<std::uint16_t>(uint_field(j, "depth"));
    const auto kind = frame_kind_from_name(string_field(j, "kind"));
    if (!kind)
        bad("unknown frame kind");
    f.kind = *kind;
    const json& m = field(j, "method");
    if (!m.is_null()) {
        const auto mid = method_from_name(m.get<std::string>());
        if (!mid)
            bad("unknown method name in frame");
        f.method = *mid;
    }
    f.args = field(j, "args");
    f.gas_in = uint_field(j, "gas_in");
    f.gas_out = uint_field(j, "gas_out");
    const std::string res = string_field(j, "result");
    if (res == "success")
        f.result = CallResult::success();
    else if (res == "revert")
        f.result = CallResult::revert();
    else
        bad("frame result must be \"success\" or \"revert\"");
    const json& gb = field(j, "ginv_before");
    if (!gb.is_null())
        f.ginv_before = gb.get<bool>();
    const json& ga = field(j, "ginv_after");
    if (!ga.is_null())
        f.ginv_after = ga.get<bool>();
    f.state_hash_after = hash_from_hex(string_field(j, "state_hash_after"));
    return f;
}

json to_json(const Violation& v) {
    return json{
        {"kind", std::string(violation_kind_name(v.kind))},
        {"frame", v.frame},
        {"message", v.message},
    };
}

Violation violation_from_json(const json& j) {
    Violation v;
    const auto kind = violation_kind_from_name(string_field(j, "kind"));
    if (!kind)
        bad("unknown violation kind");
    v.kind = *kind;
    const json& f = field(j, "frame");
    if (!f.is_number_integer())
        bad("violation frame must be an integer");
    v.frame = f.get<std::int64_t>();
    v.message = string_field(j, "message");
    return v;
}

json to_json(const Trace& t) {
    json txs = json::array();
    for (const Transaction& tx : t.transactions)
        txs.push_back(to_json(tx));
    json frames = json::array();
    for (const Frame& f : t.frames)
        frames.push_back(to_json(f));
    return json{
        {"version", t.version},
        {"config", to_json(t.config)},
        {"transactions", txs},
        {"choices", t.choices},
        {"frames", frames},
        {"violation", t.violation ? to_json(*t.violation) : json(nullptr)},
    };
}

Trace trace_from_json(const json& j) {
    Trace t;
    t.version = string_field(j, "version");
    if (t.version != "1")
        bad("unsupported trace version");
    t.config = run_config_from_json(field(j, "config"));
    const json& txs = field(j, "transactions");
    if (!txs.is_array())
        bad("transactions must be an array");
    for (const json& tx : txs)
        t.transactions.push_back(transaction_from_json(tx));
    const json& choices = field(j, "choices");
    if (!choices.is_array())
        bad("choices must be an array");
    for (const json& c : choices) {
        if (!c.is_number_unsigned())
            bad("choices entries must be non-negative integers");
        t.choices.push_back(c.get<std::uint64_t>());
    }
    const json& frames = field(j, "frames");
    if (!frames.is_array())
        bad("frames must be an array");
    for (const json& f : frames)
        t.frames.push_back(frame_from_json(f));
    const json& v = field(j, "violation");
    if (!v.is_null())
        t.violation = violation_from_json(v);
    return t;
}

json to_json(const Report& r) {
    json violations = json::array();
    for (const ViolationRecord& rec : r.violations) {
        violations.push_back(json{
            {"violation", to_json(rec.violation)},
            {"witness", to_json(rec.witness)},
        });
    }
    return json{
        {"version", r.version},
        {"mode", r.mode},
        {"config", to_json(r.config)},
        {"stats",
         json{{"worlds", r.stats.worlds},
              {"transactions_explored", r.stats.transactions_explored},
              {"branches", r.stats.branches},
              {"frames_total", r.stats.frames_total},
              {"invariant_checks", r.stats.invariant_checks},
              {"gas_checks", r.stats.gas_checks},
              {"purity_checks", r.stats.purity_checks},
              {"history_checks", r.stats.history_checks}}},
        {"violating_runs", r.violating_runs},
        {"violations", violations},
        {"complete", r.complete},
    };
}

std::string dump_canonical(const json& j) {
    // nlohmann::json with the default object container keeps keys sorted, so
    // one dump format gives byte-identical output for equal values.
    return j.dump(2) + "\n";
}

Trace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        bad("cannot open trace file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        bad("trace file is not valid JSON: " + std::string(e.what()));
    }
    return trace_from_json(j);
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        bad("cannot open output file for writing: " + path);
    out << dump_canonical(j);
    if (!out)
        bad("failed writing output file: " + path);
}

} // namespace cwb
