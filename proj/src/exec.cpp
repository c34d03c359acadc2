// cwb: concrete transaction execution.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/exec.hpp"

#include "cwb/check.hpp"

namespace cwb {

void RunCounters::add(const RunCounters& o) {
    invariant_checks += o.invariant_checks;
    gas_checks += o.gas_checks;
    purity_checks += o.purity_checks;
    history_checks += o.history_checks;
    adversary_transfer_branch += o.adversary_transfer_branch;
    adversary_mint_branch += o.adversary_mint_branch;
    adversary_skip_branch += o.adversary_skip_branch;
    adversary_recursions += o.adversary_recursions;
}

namespace {

// Ample funding: far above any amount the models can move, far below any sum
// that could overflow 256-bit ether accounting.
U256 account_seed() {
    U256 v;
    v.limb[3] = 1; // 2^192
    return v;
}

struct Ctx {
    const RunConfig& cfg;
    HavocDomains dom;
    World& world;
    ChoiceSource& cs;
    Trace& trace;
    RunCounters& counters;

    bool violated() const { return trace.violation.has_value(); }

    void violation(ViolationKind kind, std::int64_t frame, std::string msg) {
        if (!trace.violation)
            trace.violation = Violation{kind, frame, std::move(msg)};
    }

    std::size_t begin_frame(std::uint16_t depth, FrameKind kind, std::optional<MethodId> method,
                            json args, Gas gas_in) {
        Frame f;
        f.depth = depth;
        f.kind = kind;
        f.method = method;
        f.args = std::move(args);
        f.gas_in = gas_in;
        trace.frames.push_back(std::move(f));
        return trace.frames.size() - 1;
    }

    void end_frame(std::size_t idx, Gas gas_out, CallResult result) {
        Frame& f = trace.frames[idx];
        f.gas_out = gas_out;
        f.result = result;
        f.state_hash_after = world_hash(world);
        check_frame_gas(idx);
    }

    // Gas obligation of one frame: strictly less gas comes out than went in,
    // except that a zero budget stays zero.
    void check_frame_gas(std::size_t idx) {
        const Frame& f = trace.frames[idx];
        ++counters.gas_checks;
        const bool ok = f.gas_in == 0 ? f.gas_out == 0 : f.gas_out < f.gas_in;
        if (!ok) {
            violation(ViolationKind::GasContract, static_cast<std::int64_t>(idx),
                      "frame returned " + std::to_string(f.gas_out) + " gas from a budget of " +
                          std::to_string(f.gas_in));
        }
    }

    // Gas obligation of one call edge: the callee budget is strictly below
    // the caller's remaining gas, so call trees are well-founded.
    void check_call_edge(std::int64_t frame, Gas caller_gas, Gas callee_budget) {
        ++counters.gas_checks;
        if (callee_budget >= caller_gas) {
            violation(ViolationKind::GasContract, frame,
                      "call edge does not decrease gas: " + std::to_string(caller_gas) + " -> " +
                          std::to_string(callee_budget));
        }
    }

    // The conservation checkpoint. Required at construction exit, method
    // exits and adversarial-call entries; frame index -1 marks construction.
    bool check_token_invariant(std::int64_t frame) {
        const TokenState& tok = token_of(world);
        ++counters.invariant_checks;
        if (token_invariant(tok))
            return true;
        violation(ViolationKind::InvariantAtBoundary, frame,
                  "balance sum " + to_dec_string(sum_values(tok.balances)) +
                      " diverges from minted total " + to_dec_string(tok.total_amount));
        return false;
    }

    bool is_token() const { return is_token_model(cfg.model); }
};

// Records whether the conservation invariant held, without raising: used for
// the informational before/after fields at boundaries that are not required
// checkpoints.
std::optional<bool> observe_ginv(const Ctx& ctx) {
    if (!ctx.is_token())
        return std::nullopt;
    return token_invariant(token_of(ctx.world));
}

struct ExtResult {
    Gas gas_left = 0;
    CallResult verdict;
};

ExtResult external_call(Ctx& ctx, Gas gas, std::uint16_t depth);

// Re-entrant call into a plain token method, as made from adversarial code.
// The adversary targets the primitive transfer and mint entry points; both
// run the plain write sequence with no further notification.
Gas reentrant_transfer(Ctx& ctx, Gas budget, std::uint16_t depth) {
    const Address from = havoc_address(ctx.cs, ctx.dom);
    const Address to = havoc_address(ctx.cs, ctx.dom);
    const U256 amount = havoc_amount(ctx.cs, ctx.dom);
    const Msg msg = havoc_msg(ctx.cs, ctx.dom);
    const std::size_t frame = ctx.begin_frame(
        depth, FrameKind::Reentrant, MethodId::Transfer,
        json{{"from", from.index}, {"to", to.index}, {"amount", to_dec_string(amount)},
             {"sender", msg.sender.index}},
        budget);
    ctx.trace.frames[frame].ginv_before = observe_ginv(ctx);
    TokenState& tok = token_of(ctx.world);
    const TokenState before = tok;
    const MethodResult r = transfer(tok, from, to, amount, msg, budget, ctx.cfg.semantics);
    ctx.trace.frames[frame].ginv_after = observe_ginv(ctx);
    ctx.check_token_invariant(static_cast<std::int64_t>(frame)); // method exit checkpoint
    if (!r.result.ok()) {
        ++ctx.counters.purity_checks;
        if (!(tok == before)) {
            ctx.violation(ViolationKind::RevertPurity, static_cast<std::int64_t>(frame),
                          "reverted transfer left the state changed");
        }
    }
    ctx.end_frame(frame, r.gas_left, r.result);
    return r.gas_left;
}

Gas reentrant_mint(Ctx& ctx, Gas budget, std::uint16_t depth) {
    const Address to = havoc_address(ctx.cs, ctx.dom);
    const U256 amount = havoc_amount(ctx.cs, ctx.dom);
    const Msg msg = havoc_msg(ctx.cs, ctx.dom);
    const std::size_t frame = ctx.begin_frame(
        depth, FrameKind::Reentrant, MethodId::Mint,
        json{{"to", to.index}, {"amount", to_dec_string(amount)}, {"sender", msg.sender.index}},
        budget);
    ctx.trace.frames[frame].ginv_before = observe_ginv(ctx);
    TokenState& tok = token_of(ctx.world);
    const TokenState before = tok;
    const MethodResult r = mint(tok, to, amount, msg, budget, ctx.cfg.semantics);
    ctx.trace.frames[frame].ginv_after = observe_ginv(ctx);
    ctx.check_token_invariant(static_cast<std::int64_t>(frame));
    if (!r.result.ok()) {
        ++ctx.counters.purity_checks;
        if (!(tok == before)) {
            ctx.violation(ViolationKind::RevertPurity, static_cast<std::int64_t>(frame),
                          "reverted mint left the state changed");
        }
    }
    ctx.end_frame(frame, r.gas_left, r.result);
    return r.gas_left;
}

// The adversarial environment. One frame per activation: it may re-enter the
// token once, may hand control to a fresh adversarial activation with less
// gas, and otherwise reports an arbitrary verdict. Gas handling on the plain
// exit follows the modelled source: under literal_gas_reset the frame's
// entry budget, not the gas remaining after the re-entrant call, is charged
// one unit.
ExtResult external_call(Ctx& ctx, Gas gas, std::uint16_t depth) {
    const std::size_t frame =
        ctx.begin_frame(depth, FrameKind::External, std::nullopt, json::object(), gas);
    if (ctx.is_token()) {
        const bool entry_ok = token_invariant(token_of(ctx.world));
        ctx.trace.frames[frame].ginv_before = entry_ok;
        ctx.check_token_invariant(static_cast<std::int64_t>(frame)); // call entry checkpoint
    }

    const std::uint64_t k = havoc_nat(ctx.cs);
    Gas g = gas;
    if (k % 3 == 0 && gas >= 1) {
        ++ctx.counters.adversary_transfer_branch;
        ctx.check_call_edge(static_cast<std::int64_t>(frame), gas, gas - 1);
        g = reentrant_transfer(ctx, gas - 1, static_cast<std::uint16_t>(depth + 1));
    } else if (k % 3 == 1 && gas >= 1) {
        ++ctx.counters.adversary_mint_branch;
        ctx.check_call_edge(static_cast<std::int64_t>(frame), gas, gas - 1);
        g = reentrant_mint(ctx, gas - 1, static_cast<std::uint16_t>(depth + 1));
    } else {
        ++ctx.counters.adversary_skip_branch;
    }

    ExtResult out;
    const bool recurse = havoc_bool(ctx.cs);
    if (recurse && g >= 1) {
        ++ctx.counters.adversary_recursions;
        ctx.check_call_edge(static_cast<std::int64_t>(frame), g, g - 1);
        out = external_call(ctx, g - 1, static_cast<std::uint16_t>(depth + 1));
    } else {
        out.gas_left = ctx.cfg.semantics.literal_gas_reset ? revert_gas(gas) : revert_gas(g);
        out.verdict = havoc_result(ctx.cs);
    }
    ctx.trace.frames[frame].ginv_after = observe_ginv(ctx);
    ctx.end_frame(frame, out.gas_left, out.verdict);
    return out;
}

// The notifying transfer: guard, variant-specific prologue writes, the
// adversarial notification, then the variant's epilogue writes.
MethodResult transfer_with_notify(Ctx& ctx, Address from, Address to, const U256& amount,
                                  const Msg& msg, Gas gas, std::int64_t frame) {
    TokenState& tok = token_of(ctx.world);
    if (!transfer_allowed(tok, from, to, amount, msg, gas, ctx.cfg.semantics))
        return {revert_gas(gas), CallResult::revert()};
    const TokenState entry_state = tok;
    const NotifyPrologue pro =
        notify_prologue(tok, token_variant_of(ctx.cfg.model), from, to, amount, msg);
    ctx.check_call_edge(frame, gas, gas - 1);
    const ExtResult ext = external_call(ctx, gas - 1, 1);
    if (ctx.cfg.semantics.propagate_external_failure && !ext.verdict.ok()) {
        token_of(ctx.world) = entry_state; // full revert of the notify call
        return {revert_gas(ext.gas_left), CallResult::revert()};
    }
    notify_epilogue(token_of(ctx.world), pro, from);
    return {ext.gas_left >= 1 ? ext.gas_left - 1 : 0, CallResult::success()};
}

json tx_args_json(const Transaction& tx) {
    json j{{"caller", tx.caller.index}, {"value", to_dec_string(tx.value)}};
    switch (tx.method) {
    case MethodId::Transfer:
    case MethodId::TransferNotify:
        j["from"] = tx.from.index;
        j["to"] = tx.to.index;
        j["amount"] = to_dec_string(tx.amount);
        break;
    case MethodId::Mint:
        j["to"] = tx.to.index;
        j["amount"] = to_dec_string(tx.amount);
        break;
    case MethodId::Bid:
    case MethodId::AuctionEnd:
    case MethodId::Withdraw:
        break;
    }
    return j;
}

void check_method_supported(const RunConfig& cfg, MethodId m) {
    const bool token = is_token_model(cfg.model);
    switch (m) {
    case MethodId::Transfer:
    case MethodId::Mint:
        if (!token)
            throw ConfigError("token methods are not available on the auction model");
        return;
    case MethodId::TransferNotify:
        if (cfg.model != ModelId::TokenNotifySafe && cfg.model != ModelId::TokenNotifyVuln)
            throw ConfigError("transfer-notify requires a notifying token model");
        return;
    case MethodId::Bid:
    case MethodId::AuctionEnd:
    case MethodId::Withdraw:
        if (token)
            throw ConfigError("auction methods are not available on token models");
        return;
    }
    throw ConfigError("unknown method");
}

void run_transaction(Ctx& ctx, const Transaction& tx) {
    check_method_supported(ctx.cfg, tx.method);
    CWB_REQUIRE(tx.caller.index < ctx.cfg.n_addresses);
    const std::size_t frame =
        ctx.begin_frame(0, FrameKind::Transaction, tx.method, tx_args_json(tx), tx.gas);
    ctx.trace.frames[frame].ginv_before = observe_ginv(ctx);
    const std::int64_t fidx = static_cast<std::int64_t>(frame);
    const Msg msg{tx.caller, tx.value};

    // The transaction layer rejects unaffordable value before the method runs.
    if (ctx.world.account_eth[tx.caller.index] < tx.value) {
        ctx.trace.frames[frame].ginv_after = ctx.trace.frames[frame].ginv_before;
        ctx.end_frame(frame, revert_gas(tx.gas), CallResult::revert());
        return;
    }

    MethodResult r;
    const bool token = ctx.is_token();
    const World before = ctx.world;
    std::size_t history_before = 0;
    if (!token)
        history_before = auction_of(ctx.world).history.size();

    switch (tx.method) {
    case MethodId::Transfer:
        r = transfer(token_of(ctx.world), tx.from, tx.to, tx.amount, msg, tx.gas,
                     ctx.cfg.semantics);
        break;
    case MethodId::Mint:
        r = mint(token_of(ctx.world), tx.to, tx.amount, msg, tx.gas, ctx.cfg.semantics);
        break;
    case MethodId::TransferNotify:
        r = transfer_with_notify(ctx, tx.from, tx.to, tx.amount, msg, tx.gas, fidx);
        break;
    case MethodId::Bid:
        r = bid(auction_of(ctx.world), ctx.world.account_eth, msg, tx.gas);
        break;
    case MethodId::AuctionEnd:
        r = auction_end(auction_of(ctx.world), ctx.world.account_eth, msg, tx.gas);
        break;
    case MethodId::Withdraw:
        r = withdraw(auction_of(ctx.world), ctx.world.account_eth, msg, tx.gas);
        break;
    }

    if (r.result.ok()) {
        // Collect the attached value from the caller's account.
        const auto debited = checked_sub(ctx.world.account_eth[tx.caller.index], tx.value);
        CWB_CHECK(debited.has_value());
        ctx.world.account_eth[tx.caller.index] = *debited;
    }
    // Burned gas is paid at the configured price.
    CWB_CHECK(r.gas_left <= tx.gas);
    const WideNat fee = transaction_fee(tx.gas, r.gas_left, ctx.cfg.gas_price);
    if (!fee.is_zero()) {
        U256 fee256;
        bool narrow = true;
        for (int i = 0; i < 4; ++i)
            fee256.limb[i] = fee.limb[i];
        for (int i = 4; i < 7; ++i)
            narrow = narrow && fee.limb[i] == 0;
        CWB_CHECK(narrow);
        const auto paid = checked_sub(ctx.world.account_eth[tx.caller.index], fee256);
        CWB_CHECK(paid.has_value()); // funded accounts cover any configured fee
        ctx.world.account_eth[tx.caller.index] = *paid;
    }

    ctx.trace.frames[frame].ginv_after = observe_ginv(ctx);
    if (token)
        ctx.check_token_invariant(fidx); // method exit checkpoint

    if (!r.result.ok()) {
        ++ctx.counters.purity_checks;
        // Reverts leave no trace in the executable contract state. The
        // auction's ghost history is exempt: it records the revert itself.
        // Account ether is a transaction-layer matter (the gas fee is due
        // either way), so it stays out of this comparison.
        const bool pure = token ? token_of(ctx.world) == token_of(before)
                                : auction_exec_equal(auction_of(ctx.world), auction_of(before));
        if (!pure) {
            ctx.violation(ViolationKind::RevertPurity, fidx,
                          "reverted transaction left the state changed");
        }
    }

    if (!token) {
        // Exactly one history snapshot per method return, and the snapshot
        // discipline between adjacent entries must hold.
        const AuctionState& au = auction_of(ctx.world);
        ++ctx.counters.history_checks;
        if (au.history.size() != history_before + 1) {
            ctx.violation(ViolationKind::HistoryMonotonicity, fidx,
                          "method appended " +
                              std::to_string(au.history.size() - history_before) +
                              " history entries instead of one");
        } else {
            const HistoryEntry& latest = au.history.back();
            const HistoryEntry expected{au.ended, au.highest_bid};
            ++ctx.counters.history_checks;
            if (!(latest == expected)) {
                ctx.violation(ViolationKind::HistoryMonotonicity, fidx,
                              "history snapshot does not match the state at return");
            }
            ++ctx.counters.history_checks;
            if (au.history.size() >= 2 &&
                !history_step_ok(au.history[au.history.size() - 2], latest)) {
                ctx.violation(ViolationKind::HistoryMonotonicity, fidx,
                              "history step violates the temporal discipline");
            }
        }
    }

    ctx.end_frame(frame, r.gas_left, r.result);
}

} // namespace

World initial_world(const RunConfig& cfg) {
    if (cfg.n_addresses < 1 || cfg.n_addresses > kMaxAddresses)
        throw ConfigError("addresses must be between 1 and 8");
    if (cfg.amounts.empty())
        throw ConfigError("the amount domain must not be empty");
    World w;
    w.n_addresses = static_cast<std::uint8_t>(cfg.n_addresses);
    for (unsigned i = 0; i < cfg.n_addresses; ++i)
        w.account_eth[i] = account_seed();
    const Address deployer{0, false};
    if (is_token_model(cfg.model)) {
        TokenState tok = new_token(Msg{deployer, U256()});
        CWB_ENSURE(token_invariant(tok)); // construction exit checkpoint
        if (cfg.setup_mint) {
            const MethodResult r = mint(tok, cfg.setup_mint->to, cfg.setup_mint->amount,
                                        Msg{deployer, U256()}, 2, cfg.semantics);
            if (!r.result.ok())
                throw ConfigError("the configured setup mint reverts");
            CWB_ENSURE(token_invariant(tok));
        }
        w.contract = std::move(tok);
    } else {
        if (cfg.setup_mint)
            throw ConfigError("setup_mint does not apply to the auction model");
        w.contract = new_auction(deployer, Msg{deployer, U256()});
    }
    return w;
}

namespace {

SequenceResult run_loop(const RunConfig& cfg, World world, const std::vector<Transaction>& txs,
                        ChoiceSource& cs, bool construction_check) {
    SequenceResult out;
    out.trace.config = cfg;
    out.final_world = std::move(world);
    Ctx ctx{cfg, cfg.domains(), out.final_world, cs, out.trace, out.counters};
    if (construction_check && ctx.is_token())
        ctx.check_token_invariant(-1); // construction exit checkpoint
    for (const Transaction& tx : txs) {
        run_transaction(ctx, tx);
        out.trace.transactions.push_back(tx);
        if (ctx.violated())
            break;
    }
    out.trace.choices = cs.consumed();
    return out;
}

} // namespace

SequenceResult run_sequence(const RunConfig& cfg, const std::vector<Transaction>& txs,
                            ChoiceSource& cs) {
    return run_loop(cfg, initial_world(cfg), txs, cs, /*construction_check=*/true);
}

SequenceResult run_sequence_on(const RunConfig& cfg, World world,
                               const std::vector<Transaction>& txs, ChoiceSource& cs) {
    return run_loop(cfg, std::move(world), txs, cs, /*construction_check=*/false);
}

} // namespace cwb
