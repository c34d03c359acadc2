// cwb: core model vocabulary shared by every contract model.
// SPDX-License-Identifier: Apache-2.0
//
// Addresses, call messages, gas, call outcomes and the balance map. All of it
// is plain value data so whole machine states copy, compare and hash cheaply.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwb/u256.hpp"
#include "cwb/widenat.hpp"

namespace cwb {

// The address universe is tiny and interned by index.
inline constexpr unsigned kMaxAddresses = 8;

struct Address {
    std::uint8_t index = 0;
    bool is_contract = false;

    friend constexpr bool operator==(const Address&, const Address&) = default;
    friend constexpr auto operator<=>(const Address&, const Address&) = default;
};

// Human names for the interned addresses of one scenario.
class AddressRegistry {
  public:
    AddressRegistry(unsigned count, std::vector<std::string> names);

    static AddressRegistry token_default(unsigned count);
    static AddressRegistry auction_default(unsigned count);

    unsigned size() const { return count_; }
    Address at(unsigned i) const;
    const std::string& name(Address a) const;
    std::optional<Address> by_name(std::string_view name) const;

  private:
    unsigned count_;
    std::vector<std::string> names_;
};

struct Msg {
    Address sender;
    U256 value;

    friend bool operator==(const Msg&, const Msg&) = default;
};

using Gas = std::uint64_t;

// Reverting costs one unit of gas when any is left.
inline Gas revert_gas(Gas gas) {
    return gas >= 1 ? gas - 1 : 0;
}

enum class CallStatus : std::uint8_t { Revert = 0, Success = 1 };

// Outcome of one contract call: either all effects applied, or none.
struct CallResult {
    CallStatus status = CallStatus::Revert;

    static CallResult revert() { return {CallStatus::Revert}; }
    static CallResult success() { return {CallStatus::Success}; }
    bool ok() const { return status == CallStatus::Success; }

    friend bool operator==(const CallResult&, const CallResult&) = default;
};

// What a contract method hands back to its caller: the remaining gas and
// whether the call committed or reverted.
struct MethodResult {
    Gas gas_left = 0;
    CallResult result;

    friend bool operator==(const MethodResult&, const MethodResult&) = default;
};

// Partial map from addresses to 256-bit values with explicit key presence:
// an address holding zero is distinct from an absent address.
struct BalanceMap {
    std::uint8_t present = 0;
    std::array<U256, kMaxAddresses> value{};

    bool contains(Address a) const { return (present >> a.index) & 1u; }
    const U256& get(Address a) const;
    U256 get_or_zero(Address a) const { return contains(a) ? value[a.index] : U256(); }
    void set(Address a, const U256& v);
    void erase(Address a);
    unsigned size() const;

    friend bool operator==(const BalanceMap&, const BalanceMap&) = default;
};

// Execution-semantics switches. The defaults mirror the modelled source
// faithfully, including its quirks; the alternates are documented tightenings.
struct Semantics {
    // On the adversary's no-recursion exit, charge one unit off the frame's
    // entry gas (faithful) instead of off the gas remaining after inner calls
    // (strict accounting).
    bool literal_gas_reset = true;
    // Treat an adversarial Revert verdict as failing the enclosing call.
    bool propagate_external_failure = false;
    // Add "msg.value == 0" to the token method guards.
    bool strict_nonpayable = false;

    friend bool operator==(const Semantics&, const Semantics&) = default;
};

// Exact sum of every present value; needs more than 256 bits of range.
WideNat sum_values(const BalanceMap& m);

// Gas actually burned times the price, as an exact natural.
WideNat transaction_fee(Gas max_gas, Gas gas_left, const U256& gas_price);

} // namespace cwb
