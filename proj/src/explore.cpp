// cwb: bounded-exhaustive exploration engine.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/explore.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "cwb/check.hpp"
#include "cwb/exec.hpp"

namespace cwb {

namespace {

using u128 = unsigned __int128;

// Fork widths per draw type: canonical decode representatives, capped by the
// configured maximum choice value.
struct ForkWidths {
    unsigned k = 3;
    unsigned b = 2;
    unsigned r = 2;
    unsigned addr = 1;
    unsigned amount = 1;
};

ForkWidths fork_widths(const RunConfig& cfg) {
    const unsigned cap = cfg.max_choice_value;
    ForkWidths f;
    f.k = std::min(3u, cap);
    f.b = std::min(2u, cap);
    f.r = std::min(2u, cap);
    f.addr = std::min(cfg.n_addresses, cap);
    f.amount = std::min(static_cast<unsigned>(cfg.amounts.size()), cap);
    return f;
}

std::string bytes_to_string(const std::vector<std::uint8_t>& v) {
    return std::string(v.begin(), v.end());
}

std::string token_key(const TokenState& st) {
    std::vector<std::uint8_t> bytes;
    serialize_token_state(st, bytes);
    return bytes_to_string(bytes);
}

// ---- interning of token states reached inside adversarial subtrees ----

class StatePool {
  public:
    std::uint32_t intern(const TokenState& st) {
        std::string key = token_key(st);
        const std::lock_guard<std::mutex> lock(mu_);
        const auto it = ids_.find(key);
        if (it != ids_.end())
            return it->second;
        const auto id = static_cast<std::uint32_t>(states_.size());
        states_.push_back(st);
        inv_.push_back(token_invariant(st));
        ids_.emplace(std::move(key), id);
        return id;
    }

    TokenState state(std::uint32_t id) const {
        const std::lock_guard<std::mutex> lock(mu_);
        CWB_REQUIRE(id < states_.size());
        return states_[id];
    }

    // Whether the interned state satisfies the conservation invariant,
    // evaluated once when the state was first seen.
    bool invariant_ok(std::uint32_t id) const {
        const std::lock_guard<std::mutex> lock(mu_);
        CWB_REQUIRE(id < inv_.size());
        return inv_[id];
    }

    std::size_t size() const {
        const std::lock_guard<std::mutex> lock(mu_);
        return states_.size();
    }

  private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::deque<TokenState> states_;
    std::deque<bool> inv_;
};

// One terminal of an adversarial subtree: the token state on exit, the gas
// handed back and the adversary's verdict.
struct Final {
    std::uint32_t sid = 0;
    Gas gas = 0;
    std::uint8_t verdict = 0;

    friend bool operator==(const Final&, const Final&) = default;
    friend auto operator<=>(const Final&, const Final&) = default;
};

// Memoized value of one adversarial activation at (state, gas).
struct ENode {
    std::vector<Final> all;   // terminals over every decode-distinct path
    // Terminals reachable on some checkpoint-clean path; empty optional means
    // every terminal is (the common case, shared with `all` to save space).
    std::optional<std::vector<Final>> clean_subset;
    u128 leaves = 0;
    u128 frames = 0;
    bool any_violation = false;
    bool entry_violation = false;
    // Check evaluations made while computing this node, credited exactly once.
    std::uint64_t cnt_invariant = 0;
    std::uint64_t cnt_purity = 0;

    const std::vector<Final>& clean() const { return clean_subset ? *clean_subset : all; }
};

// Successor summary of a node when the epilogue writes nothing back: the
// distinct clean terminal states that satisfy the invariant, and whether any
// terminal state violates it. Shared by every root that reaches the node.
struct NodeSuccessors {
    std::vector<std::uint32_t> sids;
    bool any_exit_violation = false;
};

class NodeMemo {
  public:
    const ENode* find(std::uint64_t key) const {
        const std::lock_guard<std::mutex> lock(mu_);
        const auto it = nodes_.find(key);
        return it == nodes_.end() ? nullptr : it->second.get();
    }

    // Keeps the first insert; a racing duplicate is discarded and the winner
    // returned, with `won` saying whose check counters to credit.
    const ENode* insert(std::uint64_t key, std::unique_ptr<ENode> node, bool& won) {
        const std::lock_guard<std::mutex> lock(mu_);
        const auto [it, inserted] = nodes_.try_emplace(key, std::move(node));
        won = inserted;
        return it->second.get();
    }

    std::size_t size() const {
        const std::lock_guard<std::mutex> lock(mu_);
        return nodes_.size();
    }

    std::size_t finals_stored() const {
        const std::lock_guard<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& [key, node] : nodes_) {
            n += node->all.size();
            if (node->clean_subset)
                n += node->clean_subset->size();
        }
        return n;
    }

  private:
    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, std::unique_ptr<ENode>> nodes_;
};

constexpr Gas kMaxExploreGas = 4096;

// Resident set size in MiB, for the env-gated diagnostics below.
std::size_t rss_mib() {
    std::FILE* f = std::fopen("/proc/self/statm", "r");
    if (f == nullptr)
        return 0;
    unsigned long total = 0;
    unsigned long resident = 0;
    const int got = std::fscanf(f, "%lu %lu", &total, &resident);
    std::fclose(f);
    if (got != 2)
        return 0;
    return resident * 4096ul / (1024ul * 1024ul);
}

bool explore_stats_enabled() { return std::getenv("CWB_EXPLORE_STATS") != nullptr; }

std::uint64_t node_key(std::uint32_t sid, Gas gas) {
    return (static_cast<std::uint64_t>(sid) << 13) | gas;
}

// ---- the memoized adversarial-subtree engine ----

struct Engine {
    const RunConfig& cfg;
    ForkWidths fork;
    StatePool pool;
    NodeMemo memo;
    std::atomic<std::uint64_t> cnt_invariant{0};
    std::atomic<std::uint64_t> cnt_purity{0};
    std::mutex succ_mu;
    std::unordered_map<std::uint64_t, std::shared_ptr<const NodeSuccessors>> succ_cache;

    explicit Engine(const RunConfig& c) : cfg(c), fork(fork_widths(c)) {}

    const ENode* expand(std::uint32_t sid, Gas gas);
    std::unique_ptr<ENode> compute(std::uint32_t sid, Gas gas);

    std::shared_ptr<const NodeSuccessors> successors_of(std::uint64_t key, const ENode* node);

    bool find_path(std::uint32_t sid, Gas gas, const std::function<bool(const Final&)>& want,
                   bool clean_only, std::vector<std::uint64_t>& tape);
};

const ENode* Engine::expand(std::uint32_t sid, Gas gas) {
    const std::uint64_t key = node_key(sid, gas);
    if (const ENode* hit = memo.find(key))
        return hit;
    std::unique_ptr<ENode> node = compute(sid, gas);
    bool won = false;
    const ENode* canonical = memo.insert(key, std::move(node), won);
    if (won) {
        cnt_invariant.fetch_add(canonical->cnt_invariant, std::memory_order_relaxed);
        cnt_purity.fetch_add(canonical->cnt_purity, std::memory_order_relaxed);
    }
    return canonical;
}

std::shared_ptr<const NodeSuccessors> Engine::successors_of(std::uint64_t key,
                                                            const ENode* node) {
    {
        const std::lock_guard<std::mutex> lock(succ_mu);
        const auto it = succ_cache.find(key);
        if (it != succ_cache.end())
            return it->second;
    }
    auto out = std::make_shared<NodeSuccessors>();
    const std::vector<Final>& clean = node->clean();
    std::size_t ci = 0;
    for (std::size_t i = 0; i < node->all.size();) {
        const std::uint32_t sid_run = node->all[i].sid;
        while (i < node->all.size() && node->all[i].sid == sid_run)
            ++i;
        const bool exit_ok = pool.invariant_ok(sid_run);
        if (!exit_ok)
            out->any_exit_violation = true;
        while (ci < clean.size() && clean[ci].sid < sid_run)
            ++ci;
        const bool reachable_clean = ci < clean.size() && clean[ci].sid == sid_run;
        if (exit_ok && reachable_clean)
            out->sids.push_back(sid_run);
    }
    const std::lock_guard<std::mutex> lock(succ_mu);
    const auto [it, inserted] = succ_cache.try_emplace(key, std::move(out));
    return it->second;
}

std::unique_ptr<ENode> Engine::compute(std::uint32_t sid, Gas gas) {
    const TokenState s0 = pool.state(sid);
    auto node = std::make_unique<ENode>();
    node->cnt_invariant = 1; // this activation's entry checkpoint
    node->entry_violation = !token_invariant(s0);
    node->any_violation = node->entry_violation;

    std::vector<Final> all;
    std::vector<Final> clean;

    // Continue one re-entry outcome through the recursion/verdict draws.
    // `dirty` marks combos whose path already failed a checkpoint;
    // `call_frames` is 1 when a re-entrant frame was opened; `mult` is how
    // many argument combos share this exact outcome, which scales the leaf
    // and frame tallies while the terminal sets dedup on their own.
    const auto continue_after_dispatch = [&](const TokenState& s1, Gas g1, bool dirty,
                                             unsigned call_frames, u128 mult) {
        node->any_violation = node->any_violation || dirty;
        const bool path_dirty = node->entry_violation || dirty;
        std::uint32_t s1id = UINT32_MAX; // interned lazily, many combos recurse
        for (unsigned bv = 0; bv < fork.b; ++bv) {
            const bool recurse = bv % 2 == 1;
            if (recurse && g1 >= 1) {
                if (s1id == UINT32_MAX)
                    s1id = pool.intern(s1);
                const ENode* child = expand(s1id, g1 - 1);
                all.insert(all.end(), child->all.begin(), child->all.end());
                if (!path_dirty) {
                    const std::vector<Final>& cc = child->clean();
                    clean.insert(clean.end(), cc.begin(), cc.end());
                }
                node->any_violation = node->any_violation || child->any_violation;
                node->leaves += mult * child->leaves;
                node->frames +=
                    mult * (static_cast<u128>(1 + call_frames) * child->leaves + child->frames);
            } else {
                // Plain exit: under literal gas accounting the unit comes off
                // this activation's entry budget, not the remaining gas.
                const Gas out =
                    cfg.semantics.literal_gas_reset ? revert_gas(gas) : revert_gas(g1);
                if (s1id == UINT32_MAX)
                    s1id = pool.intern(s1);
                for (unsigned rv = 0; rv < fork.r; ++rv) {
                    const Final f{s1id, out, static_cast<std::uint8_t>(rv % 2 == 0 ? 0 : 1)};
                    all.push_back(f);
                    if (!path_dirty)
                        clean.push_back(f);
                    node->leaves += mult;
                    node->frames += mult * (1 + call_frames);
                }
            }
        }
    };

    // A guard-failing re-entry leaves the state untouched and hands back
    // revert_gas of the callee budget, so every failing argument combo shares
    // one continuation. Only combos whose sender draw can pass the sender
    // guard are executed; the rest are counted into the shared revert class.
    const Gas revert_out = revert_gas(gas >= 1 ? gas - 1 : 0);

    for (unsigned kv = 0; kv < fork.k; ++kv) {
        if (kv % 3 == 0 && gas >= 1) {
            // Re-enter the plain transfer with havoced arguments. The guard
            // admits only sender == from, so one sender draw per combo runs.
            const u128 combos =
                static_cast<u128>(fork.addr) * fork.addr * fork.amount * fork.addr;
            u128 reverted = combos;
            for (unsigned fa = 0; fa < fork.addr; ++fa) {
                for (unsigned ta = 0; ta < fork.addr; ++ta) {
                    for (unsigned ma = 0; ma < fork.amount; ++ma) {
                        TokenState s1 = s0;
                        const MethodResult r = transfer(
                            s1, Address{static_cast<std::uint8_t>(fa), false},
                            Address{static_cast<std::uint8_t>(ta), false}, cfg.amounts[ma],
                            Msg{Address{static_cast<std::uint8_t>(fa), false}, U256()},
                            gas - 1, cfg.semantics);
                        if (!r.result.ok()) {
                            CWB_CHECK(s1 == s0);
                            continue;
                        }
                        reverted -= 1;
                        node->cnt_invariant += 1; // method exit checkpoint
                        const bool exit_viol = !token_invariant(s1);
                        continue_after_dispatch(s1, r.gas_left, exit_viol, 1, 1);
                    }
                }
            }
            node->cnt_invariant += static_cast<std::uint64_t>(reverted);
            node->cnt_purity += static_cast<std::uint64_t>(reverted);
            if (reverted > 0)
                continue_after_dispatch(s0, revert_out, node->entry_violation, 1, reverted);
        } else if (kv % 3 == 1 && gas >= 1) {
            // Re-enter the mint with havoced arguments. The guard admits only
            // sender == minter, which at most one address draw decodes to.
            const u128 combos = static_cast<u128>(fork.addr) * fork.amount * fork.addr;
            u128 reverted = combos;
            unsigned minter_sa = fork.addr; // none in the decode domain
            for (unsigned sa = 0; sa < fork.addr; ++sa) {
                if (Address{static_cast<std::uint8_t>(sa), false} == s0.minter) {
                    minter_sa = sa;
                    break;
                }
            }
            if (minter_sa < fork.addr) {
                for (unsigned ta = 0; ta < fork.addr; ++ta) {
                    for (unsigned ma = 0; ma < fork.amount; ++ma) {
                        TokenState s1 = s0;
                        const MethodResult r = mint(
                            s1, Address{static_cast<std::uint8_t>(ta), false}, cfg.amounts[ma],
                            Msg{Address{static_cast<std::uint8_t>(minter_sa), false}, U256()},
                            gas - 1, cfg.semantics);
                        if (!r.result.ok()) {
                            CWB_CHECK(s1 == s0);
                            continue;
                        }
                        reverted -= 1;
                        node->cnt_invariant += 1;
                        const bool exit_viol = !token_invariant(s1);
                        continue_after_dispatch(s1, r.gas_left, exit_viol, 1, 1);
                    }
                }
            }
            node->cnt_invariant += static_cast<std::uint64_t>(reverted);
            node->cnt_purity += static_cast<std::uint64_t>(reverted);
            if (reverted > 0)
                continue_after_dispatch(s0, revert_out, node->entry_violation, 1, reverted);
        } else {
            // No re-entry: either the dispatch skipped or there is no gas.
            continue_after_dispatch(s0, gas, false, 0, 1);
        }
    }

    const auto canon = [](std::vector<Final>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        v.shrink_to_fit(); // nodes live for the whole run, drop merge slack
    };
    canon(all);
    canon(clean);
    node->all = std::move(all);
    if (clean == node->all)
        node->clean_subset = std::nullopt;
    else
        node->clean_subset = std::move(clean);
    return node;
}

bool Engine::find_path(std::uint32_t sid, Gas gas,
                       const std::function<bool(const Final&)>& want, bool clean_only,
                       std::vector<std::uint64_t>& tape) {
    const ENode* node = expand(sid, gas);
    if (clean_only && node->entry_violation)
        return false;
    const std::vector<Final>& reachable = clean_only ? node->clean() : node->all;
    if (std::none_of(reachable.begin(), reachable.end(), want))
        return false;

    const TokenState s0 = pool.state(sid);

    const auto try_continuation = [&](const TokenState& s1, Gas g1, bool dirty) -> bool {
        if (clean_only && dirty)
            return false;
        for (unsigned bv = 0; bv < fork.b; ++bv) {
            const bool recurse = bv % 2 == 1;
            tape.push_back(bv);
            if (recurse && g1 >= 1) {
                if (find_path(pool.intern(s1), g1 - 1, want, clean_only, tape))
                    return true;
            } else {
                const Gas out =
                    cfg.semantics.literal_gas_reset ? revert_gas(gas) : revert_gas(g1);
                const std::uint32_t s1id = pool.intern(s1);
                for (unsigned rv = 0; rv < fork.r; ++rv) {
                    const Final f{s1id, out, static_cast<std::uint8_t>(rv % 2 == 0 ? 0 : 1)};
                    if (want(f)) {
                        tape.push_back(rv);
                        return true;
                    }
                }
            }
            tape.pop_back();
        }
        return false;
    };

    for (unsigned kv = 0; kv < fork.k; ++kv) {
        tape.push_back(kv);
        if (kv % 3 == 0 && gas >= 1) {
            for (unsigned fa = 0; fa < fork.addr; ++fa) {
                for (unsigned ta = 0; ta < fork.addr; ++ta) {
                    for (unsigned ma = 0; ma < fork.amount; ++ma) {
                        for (unsigned sa = 0; sa < fork.addr; ++sa) {
                            TokenState s1 = s0;
                            const MethodResult r = transfer(
                                s1, Address{static_cast<std::uint8_t>(fa), false},
                                Address{static_cast<std::uint8_t>(ta), false}, cfg.amounts[ma],
                                Msg{Address{static_cast<std::uint8_t>(sa), false}, U256()},
                                gas - 1, cfg.semantics);
                            const bool exit_viol = !token_invariant(s1);
                            tape.push_back(fa);
                            tape.push_back(ta);
                            tape.push_back(ma);
                            tape.push_back(sa);
                            if (try_continuation(s1, r.gas_left, exit_viol))
                                return true;
                            tape.resize(tape.size() - 4);
                        }
                    }
                }
            }
        } else if (kv % 3 == 1 && gas >= 1) {
            for (unsigned ta = 0; ta < fork.addr; ++ta) {
                for (unsigned ma = 0; ma < fork.amount; ++ma) {
                    for (unsigned sa = 0; sa < fork.addr; ++sa) {
                        TokenState s1 = s0;
                        const MethodResult r =
                            mint(s1, Address{static_cast<std::uint8_t>(ta), false},
                                 cfg.amounts[ma],
                                 Msg{Address{static_cast<std::uint8_t>(sa), false}, U256()},
                                 gas - 1, cfg.semantics);
                        const bool exit_viol = !token_invariant(s1);
                        tape.push_back(ta);
                        tape.push_back(ma);
                        tape.push_back(sa);
                        if (try_continuation(s1, r.gas_left, exit_viol))
                            return true;
                        tape.resize(tape.size() - 3);
                    }
                }
            }
        } else {
            if (try_continuation(s0, gas, false))
                return true;
        }
        tape.pop_back();
    }
    return false;
}

// ---- per-(world, transaction) roots ----

struct RootOutcome {
    bool violating = false;
    u128 leaves = 0;
    u128 frames = 0;
    std::vector<World> successors; // sorted by exec key, deduplicated
    // Alternative successor representation when the successor world is a pure
    // function of a terminal state id: distinct ids, ascending. The merge
    // materializes each id's world at most once across the whole run.
    std::shared_ptr<const NodeSuccessors> successor_sids;
    RunCounters counters;
};

void sort_successors(std::vector<World>& ws) {
    std::vector<std::pair<std::string, std::size_t>> keyed;
    keyed.reserve(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
        keyed.emplace_back(bytes_to_string(world_exec_key(ws[i])), i);
    std::sort(keyed.begin(), keyed.end());
    std::vector<World> out;
    out.reserve(keyed.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        if (i > 0 && keyed[i].first == keyed[i - 1].first)
            continue;
        out.push_back(std::move(ws[keyed[i].second]));
    }
    ws = std::move(out);
}

// Charge the transaction fee for a root executed through the subtree engine.
void charge_fee(World& w, const Transaction& tx, Gas gas_left, const U256& gas_price) {
    const WideNat fee = transaction_fee(tx.gas, gas_left, gas_price);
    if (fee.is_zero())
        return;
    U256 fee256;
    for (int i = 0; i < 4; ++i)
        fee256.limb[i] = fee.limb[i];
    for (int i = 4; i < 7; ++i)
        CWB_CHECK(fee.limb[i] == 0);
    const auto paid = checked_sub(w.account_eth[tx.caller.index], fee256);
    CWB_CHECK(paid.has_value());
    w.account_eth[tx.caller.index] = *paid;
}

// Epilogue of the notifying transfer for one subtree terminal: the method's
// final writes, result and returned gas, applied to a copy of the world.
struct RootEpilogue {
    World world;
    Gas gas_left = 0;
    CallResult result;
};

RootEpilogue apply_epilogue(const RunConfig& cfg, const StatePool& pool, const World& base,
                            const Transaction& tx, const TokenState& entry_state,
                            const NotifyPrologue& pro, const Final& f) {
    RootEpilogue out;
    out.world = base;
    TokenState s2 = pool.state(f.sid);
    if (cfg.semantics.propagate_external_failure && f.verdict == 0) {
        s2 = entry_state;
        out.result = CallResult::revert();
        out.gas_left = revert_gas(f.gas);
    } else {
        notify_epilogue(s2, pro, tx.from);
        out.result = CallResult::success();
        out.gas_left = f.gas >= 1 ? f.gas - 1 : 0;
    }
    token_of(out.world) = std::move(s2);
    charge_fee(out.world, tx, out.gas_left, cfg.gas_price);
    return out;
}

RootOutcome run_notify_root(const RunConfig& cfg, Engine& eng, const World& w,
                            const Transaction& tx) {
    const TokenState& tok0 = token_of(w);
    const Msg msg{tx.caller, tx.value};
    CWB_REQUIRE(tx.value.is_zero());
    RootOutcome out;

    TokenState entry_state = tok0;
    TokenState pre = tok0;
    const NotifyPrologue pro =
        notify_prologue(pre, token_variant_of(cfg.model), tx.from, tx.to, tx.amount, msg);
    const std::uint32_t sid = eng.pool.intern(pre);
    const ENode* node = eng.expand(sid, tx.gas - 1);

    out.leaves = node->leaves;
    out.frames = node->leaves + node->frames; // one transaction frame per path
    out.violating = node->any_violation;

    const std::vector<Final>& clean = node->clean();
    const bool zero_fee_success =
        !cfg.semantics.propagate_external_failure && cfg.gas_price.is_zero();
    if (zero_fee_success && !pro.stale_write) {
        // Every verdict completes the method, a zero fee moves no ether and
        // the epilogue writes nothing back: a terminal's token state is the
        // successor state itself and its boundary verdict is a property of
        // the interned state alone. The whole successor summary is shared
        // across every root reaching this node.
        out.counters.invariant_checks += node->all.size(); // method exit checkpoints
        out.successor_sids = eng.successors_of(node_key(sid, tx.gas - 1), node);
        if (out.successor_sids->any_exit_violation)
            out.violating = true;
        return out;
    }
    if (zero_fee_success) {
        // The stale write makes the epilogue root-specific, but terminals
        // sharing a token state still share their successor world.
        std::size_t ci = 0;
        for (std::size_t i = 0; i < node->all.size();) {
            const std::uint32_t sid_run = node->all[i].sid;
            std::size_t j = i;
            while (j < node->all.size() && node->all[j].sid == sid_run)
                ++j;
            out.counters.invariant_checks += j - i; // method exit checkpoints
            const RootEpilogue ep =
                apply_epilogue(cfg, eng.pool, w, tx, entry_state, pro, node->all[i]);
            const bool exit_ok = token_invariant(token_of(ep.world));
            if (!exit_ok)
                out.violating = true;
            while (ci < clean.size() && clean[ci].sid < sid_run)
                ++ci;
            const bool reachable_clean = ci < clean.size() && clean[ci].sid == sid_run;
            if (exit_ok && reachable_clean)
                out.successors.push_back(ep.world);
            i = j;
        }
    } else {
        for (const Final& f : node->all) {
            const RootEpilogue ep = apply_epilogue(cfg, eng.pool, w, tx, entry_state, pro, f);
            out.counters.invariant_checks += 1; // method exit checkpoint
            const bool exit_ok = token_invariant(token_of(ep.world));
            if (!exit_ok)
                out.violating = true;
            if (!ep.result.ok()) {
                out.counters.purity_checks += 1;
                CWB_CHECK(token_of(ep.world) == entry_state);
            }
            const bool reachable_clean = std::binary_search(clean.begin(), clean.end(), f);
            if (exit_ok && reachable_clean)
                out.successors.push_back(ep.world);
        }
    }
    sort_successors(out.successors);
    return out;
}

RootOutcome run_concrete_root(const RunConfig& cfg, const World& w, const Transaction& tx) {
    ChoiceSource cs = ChoiceSource::scripted({});
    SequenceResult seq = run_sequence_on(cfg, w, {tx}, cs);
    RootOutcome out;
    out.violating = seq.trace.violation.has_value();
    out.leaves = 1;
    out.frames = seq.trace.frames.size();
    out.counters = seq.counters;
    if (!out.violating)
        out.successors.push_back(std::move(seq.final_world));
    return out;
}

bool needs_subtree_engine(const RunConfig& cfg, const World& w, const Transaction& tx) {
    if (tx.method != MethodId::TransferNotify)
        return false;
    // A failing guard reverts before the adversary runs: no draws happen and
    // the concrete path handles it in one leaf.
    return transfer_allowed(token_of(w), tx.from, tx.to, tx.amount, Msg{tx.caller, tx.value},
                            tx.gas, cfg.semantics);
}

RootOutcome run_root(const RunConfig& cfg, Engine* eng, const World& w, const Transaction& tx) {
    if (eng != nullptr && needs_subtree_engine(cfg, w, tx))
        return run_notify_root(cfg, *eng, w, tx);
    return run_concrete_root(cfg, w, tx);
}

// ---- the world graph ----

struct WorldRec {
    World world;
    std::int64_t parent = -1;
    std::int32_t parent_tx = -1;
};

struct WorldGraph {
    std::unordered_map<std::string, std::uint32_t> ids;
    std::deque<WorldRec> recs;

    // Interns a world; returns (id, inserted).
    std::pair<std::uint32_t, bool> intern(World w, std::int64_t parent, std::int32_t parent_tx) {
        std::string key = bytes_to_string(world_exec_key(w));
        const auto it = ids.find(key);
        if (it != ids.end())
            return {it->second, false};
        const auto id = static_cast<std::uint32_t>(recs.size());
        recs.push_back(WorldRec{std::move(w), parent, parent_tx});
        ids.emplace(std::move(key), id);
        return {id, true};
    }
};

} // namespace

std::vector<Transaction> transaction_domain(const RunConfig& cfg) {
    std::vector<Transaction> out;
    const auto addr = [](unsigned i) { return Address{static_cast<std::uint8_t>(i), false}; };
    if (is_token_model(cfg.model)) {
        const MethodId xfer =
            cfg.model == ModelId::TokenPlain ? MethodId::Transfer : MethodId::TransferNotify;
        for (const MethodId m : {MethodId::Transfer, MethodId::Mint, MethodId::TransferNotify}) {
            if (m == MethodId::Mint) {
                for (unsigned c = 0; c < cfg.n_addresses; ++c) {
                    for (unsigned t = 0; t < cfg.n_addresses; ++t) {
                        for (const U256& a : cfg.amounts) {
                            Transaction tx;
                            tx.caller = addr(c);
                            tx.method = MethodId::Mint;
                            tx.to = addr(t);
                            tx.amount = a;
                            tx.gas = cfg.gas_budget;
                            out.push_back(tx);
                        }
                    }
                }
            } else if (m == xfer) {
                // The sender-equals-caller guard makes other callers noise.
                for (unsigned c = 0; c < cfg.n_addresses; ++c) {
                    for (unsigned t = 0; t < cfg.n_addresses; ++t) {
                        for (const U256& a : cfg.amounts) {
                            Transaction tx;
                            tx.caller = addr(c);
                            tx.method = xfer;
                            tx.from = addr(c);
                            tx.to = addr(t);
                            tx.amount = a;
                            tx.gas = cfg.gas_budget;
                            out.push_back(tx);
                        }
                    }
                }
            }
        }
    } else {
        for (unsigned c = 0; c < cfg.n_addresses; ++c) {
            for (const U256& v : cfg.amounts) {
                Transaction tx;
                tx.caller = addr(c);
                tx.method = MethodId::Bid;
                tx.value = v;
                tx.gas = cfg.gas_budget;
                out.push_back(tx);
            }
        }
        for (const MethodId m : {MethodId::AuctionEnd, MethodId::Withdraw}) {
            for (unsigned c = 0; c < cfg.n_addresses; ++c) {
                Transaction tx;
                tx.caller = addr(c);
                tx.method = m;
                tx.gas = cfg.gas_budget;
                out.push_back(tx);
            }
        }
    }
    return out;
}

bool choice_domains_complete(const RunConfig& cfg) {
    if (!is_token_model(cfg.model) || cfg.model == ModelId::TokenPlain)
        return true; // no adversarial draws happen
    const unsigned cap = cfg.max_choice_value;
    return cap >= 3 && cap >= cfg.n_addresses && cap >= cfg.amounts.size();
}

Report explore(const RunConfig& cfg) {
    if (cfg.gas_budget > kMaxExploreGas)
        throw ConfigError("exploration gas budget is limited to 4096");
    if (cfg.workers < 1)
        throw ConfigError("workers must be at least 1");

    Report rep;
    rep.mode = "explore";
    rep.config = cfg;
    rep.complete = choice_domains_complete(cfg);

    const std::vector<Transaction> txdom = transaction_domain(cfg);
    const bool use_engine =
        cfg.model == ModelId::TokenNotifySafe || cfg.model == ModelId::TokenNotifyVuln;
    std::unique_ptr<Engine> eng;
    if (use_engine)
        eng = std::make_unique<Engine>(cfg);

    WorldGraph graph;
    graph.intern(initial_world(cfg), -1, -1);
    std::vector<std::uint32_t> frontier{0};

    u128 branches = 0;
    u128 frames = 0;
    RunCounters counters;
    // The construction checkpoint of the initial world.
    counters.invariant_checks += is_token_model(cfg.model) ? 1 : 0;
    if (is_token_model(cfg.model))
        CWB_ENSURE(token_invariant(token_of(graph.recs[0].world)));

    struct ViolatingRoot {
        std::uint32_t world_id;
        std::uint32_t tx_index;
    };
    std::vector<ViolatingRoot> violating;

    const bool stats_on = explore_stats_enabled();
    std::atomic<std::uint64_t> t_engine{0};
    std::atomic<std::uint64_t> t_concrete{0};
    std::atomic<std::uint64_t> n_engine{0};
    std::atomic<std::uint64_t> n_concrete{0};
    std::uint64_t t_merge = 0;

    // World id already assigned to a terminal state id, for roots that report
    // successors by state id. Valid because those roots only exist when the
    // non-token part of every world is constant.
    std::vector<std::int64_t> sid_to_wid;

    for (unsigned depth = 0; depth < cfg.max_transactions && !frontier.empty(); ++depth) {
        const std::size_t n_items = frontier.size() * txdom.size();
        // Roots run and merge in fixed-size slices so the buffer of pending
        // outcomes, each holding successor worlds, stays small at any moment.
        // Merging slices in item order is the same order as one big pass, so
        // world ids and parent links stay identical for every worker count.
        const std::size_t slice_cap =
            std::max<std::size_t>(static_cast<std::size_t>(cfg.workers) * 512, 2048);
        std::vector<RootOutcome> results;
        std::vector<std::uint32_t> next_frontier;
        for (std::size_t base = 0; base < n_items; base += slice_cap) {
            const std::size_t count = std::min(slice_cap, n_items - base);
            results.assign(count, RootOutcome{});

            const auto run_partition = [&](unsigned worker) {
                for (std::size_t j = worker; j < count; j += cfg.workers) {
                    const std::size_t i = base + j;
                    const std::uint32_t wid = frontier[i / txdom.size()];
                    const Transaction& tx = txdom[i % txdom.size()];
                    if (!stats_on) {
                        results[j] = run_root(cfg, eng.get(), graph.recs[wid].world, tx);
                        continue;
                    }
                    const bool is_eng =
                        eng != nullptr && needs_subtree_engine(cfg, graph.recs[wid].world, tx);
                    const auto t0 = std::chrono::steady_clock::now();
                    results[j] = run_root(cfg, eng.get(), graph.recs[wid].world, tx);
                    const auto dt = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count();
                    (is_eng ? t_engine : t_concrete)
                        .fetch_add(static_cast<std::uint64_t>(dt), std::memory_order_relaxed);
                    (is_eng ? n_engine : n_concrete).fetch_add(1, std::memory_order_relaxed);
                }
            };
            if (cfg.workers == 1) {
                run_partition(0);
            } else {
                std::vector<std::thread> threads;
                threads.reserve(cfg.workers);
                for (unsigned t = 0; t < cfg.workers; ++t)
                    threads.emplace_back(run_partition, t);
                for (std::thread& t : threads)
                    t.join();
            }

            const auto m0 = std::chrono::steady_clock::now();
            for (std::size_t j = 0; j < count; ++j) {
                RootOutcome& res = results[j];
                const std::size_t i = base + j;
                const std::uint32_t wid = frontier[i / txdom.size()];
                const auto ti = static_cast<std::uint32_t>(i % txdom.size());
                rep.stats.transactions_explored += 1;
                branches += res.leaves;
                frames += res.frames;
                counters.add(res.counters);
                if (res.violating)
                    violating.push_back(ViolatingRoot{wid, ti});
                if (res.successor_sids) {
                    for (const std::uint32_t ssid : res.successor_sids->sids) {
                        if (ssid >= sid_to_wid.size())
                            sid_to_wid.resize(eng->pool.size(), -1);
                        std::int64_t& slot = sid_to_wid[ssid];
                        if (slot >= 0)
                            continue; // this world is already in the graph
                        World sw = graph.recs[wid].world;
                        token_of(sw) = eng->pool.state(ssid);
                        const auto [swid, inserted] =
                            graph.intern(std::move(sw), wid, static_cast<std::int32_t>(ti));
                        slot = swid;
                        if (inserted)
                            next_frontier.push_back(swid);
                    }
                }
                for (World& s : res.successors) {
                    const auto [sid, inserted] =
                        graph.intern(std::move(s), wid, static_cast<std::int32_t>(ti));
                    if (inserted)
                        next_frontier.push_back(sid);
                }
            }
            t_merge += static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - m0)
                    .count());
        }
        if (stats_on) {
            std::fprintf(stderr,
                         "[cwb] depth=%u items=%zu worlds=%zu next_frontier=%zu pool=%zu "
                         "nodes=%zu finals=%zu rss_mib=%zu eng=%llu/%.1fs conc=%llu/%.1fs "
                         "merge=%.1fs\n",
                         depth, n_items, graph.recs.size(), next_frontier.size(),
                         eng ? eng->pool.size() : 0, eng ? eng->memo.size() : 0,
                         eng ? eng->memo.finals_stored() : 0, rss_mib(),
                         static_cast<unsigned long long>(n_engine.load()),
                         static_cast<double>(t_engine.load()) * 1e-9,
                         static_cast<unsigned long long>(n_concrete.load()),
                         static_cast<double>(t_concrete.load()) * 1e-9,
                         static_cast<double>(t_merge) * 1e-9);
        }
        frontier = std::move(next_frontier);
    }

    rep.stats.worlds = graph.recs.size();
    rep.stats.branches = u128_to_string(branches);
    rep.stats.frames_total = u128_to_string(frames);
    if (eng) {
        counters.invariant_checks += eng->cnt_invariant.load();
        counters.purity_checks += eng->cnt_purity.load();
    }
    rep.stats.invariant_checks = counters.invariant_checks;
    rep.stats.gas_checks = counters.gas_checks;
    rep.stats.purity_checks = counters.purity_checks;
    rep.stats.history_checks = counters.history_checks;
    rep.violating_runs = violating.size();

    // Materialize one witness trace per violating root, up to the cap: walk
    // the parent chain, recover a choice tape per hop, then rerun the
    // whole sequence concretely so the trace carries real frames and the
    // first violation exactly as a replay will see it.
    const std::size_t n_witnesses =
        std::min<std::size_t>(violating.size(), cfg.max_violation_traces);
    for (std::size_t v = 0; v < n_witnesses; ++v) {
        const ViolatingRoot root = violating[v];

        std::vector<std::pair<std::uint32_t, std::uint32_t>> hops; // (world id, tx index)
        std::int64_t cur = root.world_id;
        std::vector<std::int64_t> chain;
        while (cur != -1) {
            chain.push_back(cur);
            cur = graph.recs[static_cast<std::size_t>(cur)].parent;
        }
        std::reverse(chain.begin(), chain.end());
        for (std::size_t h = 1; h < chain.size(); ++h) {
            const WorldRec& rec = graph.recs[static_cast<std::size_t>(chain[h])];
            hops.emplace_back(static_cast<std::uint32_t>(chain[h - 1]),
                              static_cast<std::uint32_t>(rec.parent_tx));
        }
        hops.emplace_back(root.world_id, root.tx_index);

        std::vector<Transaction> txs;
        std::vector<std::uint64_t> tape;
        for (std::size_t h = 0; h < hops.size(); ++h) {
            const World& base = graph.recs[hops[h].first].world;
            const Transaction& tx = txdom[hops[h].second];
            txs.push_back(tx);
            if (!eng || !needs_subtree_engine(cfg, base, tx))
                continue;

            const Msg msg{tx.caller, tx.value};
            TokenState entry_state = token_of(base);
            TokenState pre = token_of(base);
            const NotifyPrologue pro = notify_prologue(pre, token_variant_of(cfg.model), tx.from,
                                                       tx.to, tx.amount, msg);
            const std::uint32_t sid = eng->pool.intern(pre);
            const ENode* node = eng->expand(sid, tx.gas - 1);

            std::vector<std::uint64_t> hop_tape;
            bool found = false;
            if (h + 1 < hops.size()) {
                // Interior hop: land on the terminal whose epilogue produced
                // the child world this chain goes through.
                const std::string child_key =
                    bytes_to_string(world_exec_key(graph.recs[hops[h + 1].first].world));
                const auto want = [&](const Final& f) {
                    const RootEpilogue ep =
                        apply_epilogue(cfg, eng->pool, base, tx, entry_state, pro, f);
                    return token_invariant(token_of(ep.world)) &&
                           bytes_to_string(world_exec_key(ep.world)) == child_key;
                };
                found = eng->find_path(sid, tx.gas - 1, want, /*clean_only=*/true, hop_tape);
            } else {
                // The violating hop: aim for the most severe conservation
                // class any terminal's epilogue reaches.
                ConservationClass worst = ConservationClass::Conserved;
                for (const Final& f : node->all) {
                    const RootEpilogue ep =
                        apply_epilogue(cfg, eng->pool, base, tx, entry_state, pro, f);
                    const ConservationClass c = conservation_class(token_of(ep.world));
                    if (static_cast<int>(c) > static_cast<int>(worst))
                        worst = c;
                }
                const auto want = [&](const Final& f) {
                    const RootEpilogue ep =
                        apply_epilogue(cfg, eng->pool, base, tx, entry_state, pro, f);
                    return conservation_class(token_of(ep.world)) == worst;
                };
                found = eng->find_path(sid, tx.gas - 1, want, /*clean_only=*/false, hop_tape);
            }
            CWB_CHECK(found);
            tape.insert(tape.end(), hop_tape.begin(), hop_tape.end());
        }

        ChoiceSource cs = ChoiceSource::scripted(tape);
        SequenceResult seq = run_sequence(cfg, txs, cs);
        CWB_CHECK(seq.trace.violation.has_value());
        CWB_CHECK(cs.fully_consumed());
        rep.violations.push_back(ViolationRecord{*seq.trace.violation, std::move(seq.trace)});
    }

    return rep;
}

} // namespace cwb
