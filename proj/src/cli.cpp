// cwb: command line front end.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cwb/evm/samples.hpp"
#include "cwb/explore.hpp"
#include "cwb/fuzz.hpp"
#include "cwb/replay.hpp"
#include "cwb/shrink.hpp"

namespace cwb {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

U256 parse_amount(const std::string& s, const char* what) {
    const auto v = u256_from_dec(s);
    if (!v)
        throw ConfigError(std::string(what) + " \"" + s + "\" is not a 256-bit decimal");
    return *v;
}

std::uint64_t parse_uint(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(std::string(what) + " \"" + s + "\" is not a non-negative integer");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw ConfigError(std::string(what) + " \"" + s + "\" is out of range");
    return static_cast<std::uint64_t>(v);
}

std::vector<std::uint8_t> parse_hex_bytes(std::string s) {
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0)
        s = s.substr(2);
    if (s.size() % 2 != 0)
        throw ConfigError("bytecode hex must have an even number of digits");
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> bytes;
    bytes.reserve(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); i += 2) {
        const int hi = nibble(s[i]);
        const int lo = nibble(s[i + 1]);
        if (hi < 0 || lo < 0)
            throw ConfigError("bytecode hex contains a non-hex character");
        bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return bytes;
}

std::string hex_of(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (const std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

// Options a config file may carry beyond the run configuration itself.
struct FileExtras {
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> iterations;
    std::optional<std::string> out;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
}

// Layer a partial config file over the defaults; tool-level keys are peeled
// off first, everything else must be a known run-configuration key.
RunConfig config_from_file(const std::string& path, FileExtras& extras) {
    json file = load_json_file(path);
    if (!file.is_object())
        throw ConfigError("config file must hold a JSON object");
    const auto take_uint = [&](const char* key) -> std::optional<std::uint64_t> {
        const auto it = file.find(key);
        if (it == file.end())
            return std::nullopt;
        if (!it->is_number_unsigned())
            throw ConfigError(std::string("config key \"") + key +
                              "\" must be a non-negative integer");
        const std::uint64_t v = it->get<std::uint64_t>();
        file.erase(it);
        return v;
    };
    if (const auto v = take_uint("workers"))
        extras.workers = static_cast<unsigned>(*v);
    extras.seed = take_uint("seed");
    extras.iterations = take_uint("iterations");
    if (const auto it = file.find("out"); it != file.end()) {
        if (!it->is_string())
            throw ConfigError("config key \"out\" must be a string");
        extras.out = it->get<std::string>();
        file.erase(it);
    }
    json merged = to_json(RunConfig{});
    for (const auto& item : file.items())
        merged[item.key()] = item.value();
    return run_config_from_json(merged);
}

// Everything sharable between explore and fuzz.
struct RunOpts {
    std::string config_path;
    std::string model;
    unsigned addresses = 0;
    std::string amounts;
    std::uint64_t gas = 0;
    unsigned max_txs = 0;
    unsigned max_choice = 0;
    unsigned max_witnesses = 0;
    std::string gas_price;
    std::string setup_mint;
    bool strict_gas = false;
    bool propagate_failure = false;
    bool strict_nonpayable = false;
    unsigned workers = 0;
    std::uint64_t seed = 42;
    std::uint64_t iterations = 1000;
    std::string out_path;

    CLI::App* sub = nullptr;
    FileExtras extras;
};

// True when the subcommand both registers the option and saw it on the
// command line. App::count throws on names that were never registered, and
// explore/fuzz each register a different subset of flags.
bool flag_given(const CLI::App* sub, const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

void add_run_options(CLI::App* sub, RunOpts& o, bool with_workers, bool with_seed) {
    o.sub = sub;
    sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
    sub->add_option("--model", o.model,
                    "model id: token-plain, token-notify-safe, token-notify-vuln, auction");
    sub->add_option("--addresses", o.addresses, "size of the address universe (1..8)");
    sub->add_option("--amounts", o.amounts,
                    "comma-separated amount domain; decimal values or \"max\"");
    sub->add_option("--gas", o.gas, "gas budget per transaction");
    sub->add_option("--max-txs", o.max_txs, "maximum transactions per sequence");
    sub->add_option("--max-choice", o.max_choice, "cap on each raw adversary draw");
    sub->add_option("--max-witnesses", o.max_witnesses, "violation traces kept in the report");
    sub->add_option("--gas-price", o.gas_price, "ether charged per unit of burned gas");
    sub->add_option("--setup-mint", o.setup_mint,
                    "initial mint applied at construction, as INDEX:AMOUNT");
    sub->add_flag("--strict-gas", o.strict_gas,
                  "account gas strictly after re-entrant calls instead of the literal reset");
    sub->add_flag("--propagate-failure", o.propagate_failure,
                  "revert the notifying transfer when the external call reports failure");
    sub->add_flag("--strict-nonpayable", o.strict_nonpayable,
                  "reject attached value on non-payable methods in the guard");
    if (with_workers)
        sub->add_option("--workers", o.workers, "worker threads (default 1, or WORKERS env)");
    if (with_seed) {
        sub->add_option("--seed", o.seed, "random seed (default 42)");
        sub->add_option("--iterations", o.iterations, "fuzz iterations (default 1000)");
    }
    sub->add_option("--out", o.out_path, "write the report JSON here");
}

RunConfig build_config(RunOpts& o) {
    RunConfig cfg;
    if (o.sub->count("--config") > 0)
        cfg = config_from_file(o.config_path, o.extras);

    if (o.sub->count("--model") > 0) {
        const auto m = model_id_from_name(o.model);
        if (!m)
            throw ConfigError("unknown model id: " + o.model);
        cfg.model = *m;
    }
    if (o.sub->count("--addresses") > 0)
        cfg.n_addresses = o.addresses;
    if (o.sub->count("--amounts") > 0) {
        cfg.amounts.clear();
        for (const std::string& part : split(o.amounts, ','))
            cfg.amounts.push_back(parse_amount(part, "amount"));
    }
    if (o.sub->count("--gas") > 0)
        cfg.gas_budget = o.gas;
    if (o.sub->count("--max-txs") > 0)
        cfg.max_transactions = o.max_txs;
    if (o.sub->count("--max-choice") > 0)
        cfg.max_choice_value = o.max_choice;
    if (o.sub->count("--max-witnesses") > 0)
        cfg.max_violation_traces = o.max_witnesses;
    if (o.sub->count("--gas-price") > 0)
        cfg.gas_price = parse_amount(o.gas_price, "gas price");
    if (o.sub->count("--setup-mint") > 0) {
        const auto parts = split(o.setup_mint, ':');
        if (parts.size() != 2)
            throw ConfigError("setup mint must look like INDEX:AMOUNT");
        const std::uint64_t idx = parse_uint(parts[0], "setup mint address");
        if (idx >= cfg.n_addresses)
            throw ConfigError("setup mint address is out of the address range");
        cfg.setup_mint =
            SetupMint{Address{static_cast<std::uint8_t>(idx), false},
                      parse_amount(parts[1], "setup mint amount")};
    }
    if (o.strict_gas)
        cfg.semantics.literal_gas_reset = false;
    if (o.propagate_failure)
        cfg.semantics.propagate_external_failure = true;
    if (o.strict_nonpayable)
        cfg.semantics.strict_nonpayable = true;

    // One validation path for every source of configuration.
    cfg = run_config_from_json(to_json(cfg));

    // Worker count: flag beats environment beats config file.
    unsigned workers = 1;
    if (o.extras.workers)
        workers = *o.extras.workers;
    if (const char* env = std::getenv("WORKERS"); env != nullptr && *env != '\0')
        workers = static_cast<unsigned>(parse_uint(env, "WORKERS"));
    if (flag_given(o.sub, "--workers"))
        workers = o.workers;
    if (workers < 1 || workers > 64)
        throw ConfigError("workers must be between 1 and 64");
    cfg.workers = workers;

    if (o.extras.seed && !flag_given(o.sub, "--seed"))
        o.seed = *o.extras.seed;
    if (o.extras.iterations && !flag_given(o.sub, "--iterations"))
        o.iterations = *o.extras.iterations;
    if (o.extras.out && !flag_given(o.sub, "--out"))
        o.out_path = *o.extras.out;
    return cfg;
}

void print_violation_line(std::ostream& out, const Violation& v, const char* indent) {
    out << indent << violation_kind_name(v.kind) << " at frame " << v.frame << ": " << v.message
        << "\n";
}

void print_report_summary(std::ostream& out, const Report& rep) {
    out << "mode: " << rep.mode << "\n";
    out << "model: " << model_id_name(rep.config.model) << ", addresses "
        << rep.config.n_addresses << ", gas " << rep.config.gas_budget << ", max transactions "
        << rep.config.max_transactions << "\n";
    out << "worlds: " << rep.stats.worlds << ", transactions: " << rep.stats.transactions_explored
        << ", branches: " << rep.stats.branches << ", frames: " << rep.stats.frames_total << "\n";
    out << "checks: invariant " << rep.stats.invariant_checks << ", gas " << rep.stats.gas_checks
        << ", purity " << rep.stats.purity_checks << ", history " << rep.stats.history_checks
        << "\n";
    out << "complete: " << (rep.complete ? "yes" : "no") << "\n";
    out << "violating runs: " << rep.violating_runs << " (" << rep.violations.size()
        << " witnesses recorded)\n";
    for (const ViolationRecord& rec : rep.violations)
        print_violation_line(out, rec.violation, "  ");
}

int finish_report(const Report& rep, const std::string& out_path, std::ostream& out) {
    print_report_summary(out, rep);
    if (!out_path.empty()) {
        save_json_file(out_path, to_json(rep));
        out << "report written to " << out_path << "\n";
    }
    return rep.violating_runs == 0 ? kExitClean : kExitViolations;
}

int do_replay(const std::string& trace_path, const std::string& out_path, std::ostream& out) {
    const Trace input = load_trace_file(trace_path);
    const ReplayResult result = replay(input);

    if (result.run) {
        const Trace& t = result.run->trace;
        out << "replayed " << t.transactions.size() << " transactions, " << t.frames.size()
            << " frames\n";
        if (t.violation)
            print_violation_line(out, *t.violation, "violation: ");
        else
            out << "violation: none\n";
    }
    if (result.matches()) {
        out << "replay matches the recording\n";
    } else {
        out << "divergences:\n";
        for (const std::string& d : result.divergences)
            out << "  " << d << "\n";
    }

    if (!out_path.empty()) {
        json report{{"mode", "replay"},
                    {"matches", result.matches()},
                    {"divergences", result.divergences},
                    {"trace", result.run ? to_json(result.run->trace) : json(nullptr)}};
        save_json_file(out_path, report);
        out << "report written to " << out_path << "\n";
    }
    if (!result.matches())
        return kExitDivergence;
    return result.run->trace.violation ? kExitViolations : kExitClean;
}

int do_shrink(const std::string& trace_path, const std::string& out_path, std::ostream& out) {
    const Trace input = load_trace_file(trace_path);
    const ShrinkResult result = shrink(input);

    out << "shrunk " << input.transactions.size() << " -> " << result.trace.transactions.size()
        << " transactions, " << input.choices.size() << " -> " << result.trace.choices.size()
        << " choices (" << result.rounds << " rounds, " << result.candidates_tried
        << " candidates)\n";
    print_violation_line(out, *result.trace.violation, "violation: ");

    if (out_path.empty()) {
        out << dump_canonical(to_json(result.trace));
    } else {
        save_json_file(out_path, to_json(result.trace));
        out << "minimized trace written to " << out_path << "\n";
    }
    return kExitViolations;
}

int do_evm_run(const std::string& code_hex, std::uint64_t gas, std::uint64_t steps,
               const std::vector<std::string>& storage_kvs, std::ostream& out) {
    evm::Storage storage;
    for (const std::string& kvs : storage_kvs) {
        for (const std::string& kv : split(kvs, ',')) {
            const auto parts = split(kv, '=');
            if (parts.size() != 2)
                throw ConfigError("storage entries must look like KEY=VALUE");
            storage[parse_amount(parts[0], "storage key")] =
                parse_amount(parts[1], "storage value");
        }
    }

    evm::MachineState st = evm::init(parse_hex_bytes(code_hex), gas, std::move(storage));
    std::vector<evm::StepRecord> trajectory;
    st = evm::execute_n(std::move(st), steps, evm::default_schedule(), &trajectory);

    for (const evm::StepRecord& rec : trajectory) {
        out << "pc=0x" << std::hex << rec.pc << std::dec << " op=" << evm::opcode_name(rec.opcode)
            << " gas=" << rec.gas << " stack=" << rec.stack_depth << "\n";
    }
    if (const evm::Ok* m = std::get_if<evm::Ok>(&st)) {
        out << "OK pc=0x" << std::hex << m->pc << std::dec << " gas=" << m->gas << " stack="
            << m->stack.size();
        if (!m->stack.empty())
            out << " top=" << to_dec_string(m->stack.back());
        out << "\n";
    } else if (const evm::Returns* r = std::get_if<evm::Returns>(&st)) {
        out << "RETURNS gas=" << r->gas << " data=" << hex_of(r->data) << "\n";
        for (const auto& [key, value] : r->storage)
            out << "storage[" << to_dec_string(key) << "]=" << to_dec_string(value) << "\n";
    } else if (const evm::Reverts* r = std::get_if<evm::Reverts>(&st)) {
        out << "REVERTS gas=" << r->gas << " data=" << hex_of(r->data) << "\n";
    } else {
        out << "INVALID " << evm::vm_error_name(std::get<evm::Invalid>(st).error) << "\n";
    }
    return kExitClean;
}

} // namespace

int cwb_cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"smart contract verification workbench"};
    app.name("cwb");
    app.require_subcommand(1);

    RunOpts explore_opts;
    CLI::App* explore_cmd = app.add_subcommand(
        "explore", "bounded-exhaustive exploration of transactions and adversary choices");
    add_run_options(explore_cmd, explore_opts, /*with_workers=*/true, /*with_seed=*/false);

    RunOpts fuzz_opts;
    CLI::App* fuzz_cmd =
        app.add_subcommand("fuzz", "randomized exploration of transaction sequences");
    add_run_options(fuzz_cmd, fuzz_opts, /*with_workers=*/false, /*with_seed=*/true);

    std::string replay_path;
    std::string replay_out;
    CLI::App* replay_cmd = app.add_subcommand("replay", "re-execute a recorded trace exactly");
    replay_cmd->add_option("trace", replay_path, "trace JSON file")->required();
    replay_cmd->add_option("--out", replay_out, "write the replay report JSON here");

    std::string shrink_path;
    std::string shrink_out;
    CLI::App* shrink_cmd =
        app.add_subcommand("shrink", "minimize a violating trace by delta debugging");
    shrink_cmd->add_option("trace", shrink_path, "trace JSON file")->required();
    shrink_cmd->add_option("--out", shrink_out, "write the minimized trace JSON here");

    CLI::App* evm_cmd = app.add_subcommand("evm", "run the mini EVM interpreter");
    evm_cmd->require_subcommand(1);

    std::string evm_code;
    std::uint64_t evm_gas = 40000;
    std::uint64_t evm_steps = 1000000;
    std::vector<std::string> evm_storage;
    CLI::App* evm_run_cmd = evm_cmd->add_subcommand("run", "execute bytecode and dump each step");
    evm_run_cmd->add_option("--code", evm_code, "bytecode as hex, 0x prefix optional")->required();
    evm_run_cmd->add_option("--gas", evm_gas, "gas balance (default 40000)");
    evm_run_cmd->add_option("--steps", evm_steps, "maximum steps (default 1000000)");
    evm_run_cmd->add_option("--storage", evm_storage, "initial storage entries KEY=VALUE");

    std::uint64_t inc_random = 1000;
    std::uint64_t inc_seed = 42;
    CLI::App* evm_inc_cmd =
        evm_cmd->add_subcommand("check-inc", "run the increment-contract biconditional suite");
    evm_inc_cmd->add_option("--random", inc_random, "random values on top of the boundary set");
    evm_inc_cmd->add_option("--seed", inc_seed, "seed for the random values");

    CLI::App* evm_add_cmd =
        evm_cmd->add_subcommand("check-add", "run the exhaustive byte-add check");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitClean : kExitError;
    }

    try {
        if (explore_cmd->parsed()) {
            const RunConfig cfg = build_config(explore_opts);
            return finish_report(explore(cfg), explore_opts.out_path, out);
        }
        if (fuzz_cmd->parsed()) {
            const RunConfig cfg = build_config(fuzz_opts);
            return finish_report(fuzz(cfg, fuzz_opts.seed, fuzz_opts.iterations),
                                 fuzz_opts.out_path, out);
        }
        if (replay_cmd->parsed())
            return do_replay(replay_path, replay_out, out);
        if (shrink_cmd->parsed())
            return do_shrink(shrink_path, shrink_out, out);
        if (evm_run_cmd->parsed())
            return do_evm_run(evm_code, evm_gas, evm_steps, evm_storage, out);
        if (evm_inc_cmd->parsed()) {
            const std::uint64_t failures = evm::check_inc(inc_random, inc_seed);
            out << "increment biconditional: " << (failures == 0 ? "pass" : "FAIL") << " ("
                << failures << " failing values)\n";
            return failures == 0 ? kExitClean : kExitViolations;
        }
        if (evm_add_cmd->parsed()) {
            const std::uint64_t failures = evm::check_add_bytes();
            out << "byte add exhaustive check: " << (failures == 0 ? "pass" : "FAIL") << " ("
                << failures << " failing pairs)\n";
            return failures == 0 ? kExitClean : kExitViolations;
        }
        err << "error: no subcommand selected\n";
        return kExitError;
    } catch (const NotAViolation& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace cwb
