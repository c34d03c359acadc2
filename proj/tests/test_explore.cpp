// cwb tests: exhaustive exploration against a brute-force enumerator.
// SPDX-License-Identifier: Apache-2.0
//
// The exploration engine memoizes adversarial subtrees and collapses
// guard-equivalent draws, so its tallies are computed, not observed. The
// enumerator here does the opposite: it generates every canonical choice
// tape outright from the documented draw grammar (re-entry dispatch, then
// arguments, then the recursion bit, then the verdict), runs each tape
// through the concrete executor one at a time, and tallies what actually
// happened. The two must agree exactly.
#include <doctest.h>

#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "cwb/exec.hpp"
#include "cwb/explore.hpp"
#include "oracle_token_reference.hpp"

using cwb::Address;
using cwb::ChoiceSource;
using cwb::Gas;
using cwb::MethodId;
using cwb::ModelId;
using cwb::RunConfig;
using cwb::Transaction;
using cwb::U256;
using cwb::oracle::big;

namespace {

struct Forks {
    unsigned k, b, r, addr, amount;
};

Forks forks_of(const RunConfig& cfg) {
    const unsigned cap = cfg.max_choice_value;
    return Forks{std::min(3u, cap), std::min(2u, cap), std::min(2u, cap),
                 std::min(cfg.n_addresses, cap),
                 std::min(static_cast<unsigned>(cfg.amounts.size()), cap)};
}

using Tape = std::vector<std::uint64_t>;

// Every canonical tape of one adversarial activation at `gas`. The tape
// shape depends only on gas: a re-entered method hands back gas-2 whether it
// succeeded or reverted (one unit for the call, one inside), except that a
// one-unit budget bottoms out at zero.
class TapeGrammar {
  public:
    explicit TapeGrammar(const Forks& f) : f_(f) {}

    const std::vector<Tape>& at(Gas gas) {
        const auto it = memo_.find(gas);
        if (it != memo_.end())
            return it->second;
        std::vector<Tape> out;
        for (unsigned kv = 0; kv < f_.k; ++kv) {
            const bool reenter = (kv % 3 != 2) && gas >= 1;
            std::vector<Tape> argsets;
            if (reenter && kv % 3 == 0) {
                for (std::uint64_t fa = 0; fa < f_.addr; ++fa)
                    for (std::uint64_t ta = 0; ta < f_.addr; ++ta)
                        for (std::uint64_t ma = 0; ma < f_.amount; ++ma)
                            for (std::uint64_t sa = 0; sa < f_.addr; ++sa)
                                argsets.push_back({fa, ta, ma, sa});
            } else if (reenter) {
                for (std::uint64_t ta = 0; ta < f_.addr; ++ta)
                    for (std::uint64_t ma = 0; ma < f_.amount; ++ma)
                        for (std::uint64_t sa = 0; sa < f_.addr; ++sa)
                            argsets.push_back({ta, ma, sa});
            } else {
                argsets.push_back({});
            }
            const Gas g = reenter ? (gas >= 2 ? gas - 2 : 0) : gas;
            std::vector<Tape> tails;
            for (unsigned bv = 0; bv < f_.b; ++bv) {
                if (bv % 2 == 1 && g >= 1) {
                    for (const Tape& sub : at(g - 1)) {
                        Tape t{bv};
                        t.insert(t.end(), sub.begin(), sub.end());
                        tails.push_back(std::move(t));
                    }
                } else {
                    for (std::uint64_t rv = 0; rv < f_.r; ++rv)
                        tails.push_back({bv, rv});
                }
            }
            for (const Tape& args : argsets) {
                for (const Tape& tail : tails) {
                    Tape t{kv};
                    t.insert(t.end(), args.begin(), args.end());
                    t.insert(t.end(), tail.begin(), tail.end());
                    out.push_back(std::move(t));
                }
            }
        }
        return memo_.emplace(gas, std::move(out)).first->second;
    }

  private:
    Forks f_;
    std::map<Gas, std::vector<Tape>> memo_;
};

std::string key_of(const cwb::World& w) {
    const auto bytes = cwb::world_exec_key(w);
    return std::string(bytes.begin(), bytes.end());
}

struct NaiveTally {
    std::uint64_t worlds = 0;
    std::uint64_t roots = 0;
    big branches = 0;
    big frames = 0;
    std::uint64_t violating_roots = 0;
};

NaiveTally naive_explore(const RunConfig& cfg) {
    TapeGrammar grammar(forks_of(cfg));
    const std::vector<Transaction> txdom = cwb::transaction_domain(cfg);

    std::vector<cwb::World> worlds{cwb::initial_world(cfg)};
    std::map<std::string, std::size_t> ids{{key_of(worlds[0]), 0}};
    std::vector<std::size_t> frontier{0};

    NaiveTally tally;
    const auto run_one = [&](const cwb::World& w, const Transaction& tx, const Tape& tape,
                             std::vector<std::size_t>& next) {
        auto cs = ChoiceSource::scripted(tape);
        const auto res = cwb::run_sequence_on(cfg, w, {tx}, cs);
        REQUIRE(cs.fully_consumed());
        tally.branches += 1;
        tally.frames += res.trace.frames.size();
        if (res.trace.violation.has_value())
            return true;
        const std::string key = key_of(res.final_world);
        if (ids.emplace(key, worlds.size()).second) {
            worlds.push_back(res.final_world);
            next.push_back(worlds.size() - 1);
        }
        return false;
    };

    for (unsigned depth = 0; depth < cfg.max_transactions && !frontier.empty(); ++depth) {
        std::vector<std::size_t> next;
        for (const std::size_t wid : frontier) {
            for (const Transaction& tx : txdom) {
                ++tally.roots;
                bool violated = false;
                // A transaction either consumes no draws at all or is a
                // notifying transfer whose guard passed; probe with the
                // empty tape to find out which.
                bool adversarial = false;
                try {
                    violated = run_one(worlds[wid], tx, {}, next);
                } catch (const cwb::ChoiceExhausted&) {
                    adversarial = true;
                }
                if (adversarial) {
                    REQUIRE(tx.gas >= 1);
                    for (const Tape& tape : grammar.at(tx.gas - 1))
                        violated = run_one(worlds[wid], tx, tape, next) || violated;
                }
                if (violated)
                    ++tally.violating_roots;
            }
        }
        frontier = std::move(next);
    }
    tally.worlds = worlds.size();
    return tally;
}

void check_explore_matches_naive(const RunConfig& cfg) {
    const cwb::Report rep = cwb::explore(cfg);
    const NaiveTally naive = naive_explore(cfg);
    CHECK(rep.stats.worlds == naive.worlds);
    CHECK(rep.stats.transactions_explored == naive.roots);
    CHECK(rep.stats.branches == naive.branches.str());
    CHECK(rep.stats.frames_total == naive.frames.str());
    CHECK(rep.violating_runs == naive.violating_roots);
    CHECK(rep.violations.size() ==
          std::min<std::uint64_t>(naive.violating_roots, cfg.max_violation_traces));
    for (const auto& v : rep.violations) {
        CHECK(v.witness.violation.has_value());
        CHECK(v.witness.violation == v.violation);
    }
    CHECK(rep.mode == "explore");
    CHECK(rep.config == cfg);
}

RunConfig small_base(ModelId model) {
    RunConfig cfg;
    cfg.model = model;
    cfg.n_addresses = 2;
    cfg.amounts = {U256(0), U256(1), U256::max()};
    cfg.gas_budget = 3;
    cfg.max_transactions = 2;
    cfg.setup_mint = cwb::SetupMint{Address{1, false}, U256(1)};
    return cfg;
}

} // namespace

TEST_SUITE("explore") {

TEST_CASE("transaction domains: shape, sizes, and fixed order") {
    RunConfig cfg; // defaults: notify-safe, 4 addresses, 4 amounts
    const auto notify = cwb::transaction_domain(cfg);
    CHECK(notify.size() == 128); // 64 notifying transfers + 64 mints
    for (const auto& tx : notify) {
        CHECK((tx.method == MethodId::TransferNotify || tx.method == MethodId::Mint));
        CHECK(tx.gas == cfg.gas_budget);
        CHECK(tx.value.is_zero());
        if (tx.method == MethodId::TransferNotify)
            CHECK(tx.from == tx.caller); // other senders fail the guard anyway
    }

    cfg.model = ModelId::TokenPlain;
    const auto plain = cwb::transaction_domain(cfg);
    CHECK(plain.size() == 128);
    for (const auto& tx : plain)
        CHECK((tx.method == MethodId::Transfer || tx.method == MethodId::Mint));

    cfg.model = ModelId::Auction;
    const auto auction = cwb::transaction_domain(cfg);
    CHECK(auction.size() == 24); // 16 bids + 4 ends + 4 withdraws
    unsigned bids = 0;
    for (const auto& tx : auction)
        if (tx.method == MethodId::Bid)
            ++bids;
    CHECK(bids == 16);
    CHECK(auction[0].method == MethodId::Bid);
    CHECK(auction[0].value == cfg.amounts[0]); // bid values come from amounts
}

TEST_CASE("choice domain completeness reflects the cap") {
    RunConfig cfg; // notify-safe, 4 addresses, 4 amounts, cap 6
    CHECK(cwb::choice_domains_complete(cfg));
    cfg.max_choice_value = 3;
    CHECK(!cwb::choice_domains_complete(cfg)); // 4 addresses cut to 3
    cfg.max_choice_value = 2;
    CHECK(!cwb::choice_domains_complete(cfg));
    cfg.model = ModelId::TokenPlain; // no draws happen at all
    CHECK(cwb::choice_domains_complete(cfg));
    cfg.model = ModelId::Auction;
    CHECK(cwb::choice_domains_complete(cfg));
}

TEST_CASE("differential: safe notify model, two transactions") {
    check_explore_matches_naive(small_base(ModelId::TokenNotifySafe));
}

TEST_CASE("differential: vulnerable notify model, two transactions") {
    check_explore_matches_naive(small_base(ModelId::TokenNotifyVuln));
}

TEST_CASE("differential: vulnerable model, deeper gas, one transaction") {
    RunConfig cfg = small_base(ModelId::TokenNotifyVuln);
    cfg.n_addresses = 3;
    cfg.amounts = {U256(0), U256(2)};
    cfg.gas_budget = 4;
    cfg.max_transactions = 1;
    cfg.setup_mint = cwb::SetupMint{Address{2, false}, U256(2)};
    check_explore_matches_naive(cfg);
}

TEST_CASE("differential: plain token draws nothing") {
    RunConfig cfg = small_base(ModelId::TokenPlain);
    cfg.n_addresses = 3;
    cfg.amounts = {U256(0), U256(1), U256(2)};
    cfg.gas_budget = 4;
    check_explore_matches_naive(cfg);
}

TEST_CASE("differential: auction model") {
    RunConfig cfg;
    cfg.model = ModelId::Auction;
    cfg.n_addresses = 3;
    cfg.amounts = {U256(0), U256(1), U256(2)};
    cfg.gas_budget = 3;
    cfg.max_transactions = 2;
    check_explore_matches_naive(cfg);
}

TEST_CASE("differential: a choice cap below the domains cuts the fan-out") {
    RunConfig cfg = small_base(ModelId::TokenNotifySafe);
    cfg.max_choice_value = 2; // k loses its skip arm, amounts lose MAX
    const cwb::Report rep = cwb::explore(cfg);
    CHECK(!rep.complete);
    check_explore_matches_naive(cfg);
}

TEST_CASE("differential: gas fees make successors fee-distinct") {
    RunConfig cfg = small_base(ModelId::TokenNotifyVuln);
    cfg.gas_price = U256(2);
    check_explore_matches_naive(cfg);
}

TEST_CASE("differential: propagated external failure") {
    RunConfig cfg = small_base(ModelId::TokenNotifyVuln);
    cfg.semantics.propagate_external_failure = true;
    check_explore_matches_naive(cfg);
}

TEST_CASE("differential: strict gas accounting") {
    RunConfig cfg = small_base(ModelId::TokenNotifySafe);
    cfg.semantics.literal_gas_reset = false;
    check_explore_matches_naive(cfg);
}

TEST_CASE("explore is deterministic across runs and worker counts") {
    RunConfig cfg = small_base(ModelId::TokenNotifyVuln);
    const std::string first = cwb::dump_canonical(cwb::to_json(cwb::explore(cfg)));
    const std::string second = cwb::dump_canonical(cwb::to_json(cwb::explore(cfg)));
    CHECK(first == second);
    RunConfig two = cfg;
    two.workers = 2;
    CHECK(cwb::dump_canonical(cwb::to_json(cwb::explore(two))) == first);
    RunConfig three = cfg;
    three.workers = 3;
    CHECK(cwb::dump_canonical(cwb::to_json(cwb::explore(three))) == first);
}

TEST_CASE("explore rejects unusable budgets and worker counts") {
    RunConfig cfg = small_base(ModelId::TokenNotifySafe);
    cfg.gas_budget = 4097;
    CHECK_THROWS_AS((void)cwb::explore(cfg), cwb::ConfigError);
    cfg.gas_budget = 3;
    cfg.workers = 0;
    CHECK_THROWS_AS((void)cwb::explore(cfg), cwb::ConfigError);
}

TEST_CASE("regression pin: safe model at the headline bounds, depth two") {
    // The depth-three run is the acceptance suite's job; this pins the exact
    // depth-two tallies so engine refactors cannot silently shift counts.
    RunConfig cfg;
    cfg.model = ModelId::TokenNotifySafe;
    cfg.n_addresses = 4;
    cfg.amounts = {U256(0), U256(1), U256(2), U256::max()};
    cfg.gas_budget = 6;
    cfg.max_transactions = 2;
    const cwb::Report rep = cwb::explore(cfg);
    CHECK(rep.complete);
    CHECK(rep.violating_runs == 0);
    CHECK(rep.violations.empty());
    CHECK(rep.stats.worlds == 2675);
    CHECK(rep.stats.transactions_explored == 2176);
    CHECK(rep.stats.branches == "184519844");
    CHECK(rep.stats.frames_total == "1045729180");
    CHECK(rep.stats.invariant_checks == 572849);
    CHECK(rep.stats.gas_checks == 2028);
    CHECK(rep.stats.purity_checks == 466956);
    CHECK(rep.stats.history_checks == 0);
}

TEST_CASE("every explore witness replays to its recorded violation") {
    RunConfig cfg = small_base(ModelId::TokenNotifyVuln);
    cfg.max_violation_traces = 5;
    const cwb::Report rep = cwb::explore(cfg);
    REQUIRE(rep.violating_runs > 0);
    REQUIRE(rep.violations.size() == 5);
    for (const auto& rec : rep.violations) {
        auto cs = ChoiceSource::scripted(rec.witness.choices);
        const auto res = cwb::run_sequence(rec.witness.config, rec.witness.transactions, cs);
        REQUIRE(res.trace.violation.has_value());
        CHECK(*res.trace.violation == rec.violation);
        CHECK(cs.fully_consumed());
        CHECK(res.trace.frames.size() == rec.witness.frames.size());
    }
}

} // TEST_SUITE

TEST_SUITE("world") {

TEST_CASE("model id names round-trip") {
    using cwb::ModelId;
    for (const ModelId id : {ModelId::TokenPlain, ModelId::TokenNotifySafe,
                             ModelId::TokenNotifyVuln, ModelId::Auction}) {
        const auto back = cwb::model_id_from_name(cwb::model_id_name(id));
        REQUIRE(back.has_value());
        CHECK(*back == id);
    }
    CHECK(cwb::model_id_name(ModelId::TokenNotifyVuln) == "token-notify-vuln");
    CHECK(!cwb::model_id_from_name("token").has_value());
    CHECK(cwb::is_token_model(ModelId::TokenPlain));
    CHECK(!cwb::is_token_model(ModelId::Auction));
    CHECK(cwb::token_variant_of(ModelId::TokenNotifyVuln) == cwb::TokenVariant::NotifyVulnerable);
}

TEST_CASE("execution keys ignore the auction's ghost history; hashes do not") {
    RunConfig cfg;
    cfg.model = ModelId::Auction;
    cwb::World a = cwb::initial_world(cfg);
    cwb::World b = a;
    cwb::auction_of(b).history.push_back(cwb::HistoryEntry{false, U256(5)});
    CHECK(cwb::world_exec_key(a) == cwb::world_exec_key(b));
    CHECK(cwb::world_hash(a) != cwb::world_hash(b));

    cwb::World c = a;
    cwb::auction_of(c).highest_bid = U256(1);
    CHECK(cwb::world_exec_key(a) != cwb::world_exec_key(c));
}

TEST_CASE("execution keys keep the token's ghost mint total") {
    RunConfig cfg;
    cwb::World a = cwb::initial_world(cfg);
    cwb::World b = a;
    cwb::token_of(b).total_amount.add(U256(1));
    CHECK(cwb::world_exec_key(a) != cwb::world_exec_key(b));
    CHECK(cwb::world_hash(a) != cwb::world_hash(b));

    // Presence is part of the key: a zero balance is not an absent one.
    cwb::World c = a;
    cwb::token_of(c).balances.set(Address{2, false}, U256(0));
    CHECK(cwb::world_exec_key(a) != cwb::world_exec_key(c));
}

TEST_CASE("equal worlds serialize identically; account ether matters") {
    RunConfig cfg;
    const cwb::World a = cwb::initial_world(cfg);
    const cwb::World b = cwb::initial_world(cfg);
    CHECK(a == b);
    CHECK(cwb::world_exec_key(a) == cwb::world_exec_key(b));
    CHECK(cwb::world_hash(a) == cwb::world_hash(b));
    cwb::World c = a;
    c.account_eth[1] = U256(7);
    CHECK(cwb::world_exec_key(a) != cwb::world_exec_key(c));
}

TEST_CASE("fnv1a matches the published test vectors") {
    CHECK(cwb::fnv1a_64(nullptr, 0) == 0xcbf29ce484222325ull);
    const std::uint8_t a = 'a';
    CHECK(cwb::fnv1a_64(&a, 1) == 0xaf63dc4c8601ec8cull);
    const std::uint8_t foobar[6] = {'f', 'o', 'o', 'b', 'a', 'r'};
    CHECK(cwb::fnv1a_64(foobar, 6) == 0x85944171f73967e8ull);
}

} // TEST_SUITE
