// cwb: core model vocabulary.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/core.hpp"

#include "cwb/check.hpp"

namespace cwb {

AddressRegistry::AddressRegistry(unsigned count, std::vector<std::string> names)
    : count_(count), names_(std::move(names)) {
    CWB_REQUIRE(count_ >= 1 && count_ <= kMaxAddresses);
    while (names_.size() < count_)
        names_.push_back("addr" + std::to_string(names_.size()));
    names_.resize(count_);
}

AddressRegistry AddressRegistry::token_default(unsigned count) {
    return AddressRegistry(count, {"Minter", "A", "B", "Attacker"});
}

AddressRegistry AddressRegistry::auction_default(unsigned count) {
    return AddressRegistry(count, {"Beneficiary", "A", "B", "C"});
}

Address AddressRegistry::at(unsigned i) const {
    CWB_REQUIRE(i < count_);
    return Address{static_cast<std::uint8_t>(i), false};
}

const std::string& AddressRegistry::name(Address a) const {
    CWB_REQUIRE(a.index < count_);
    return names_[a.index];
}

std::optional<Address> AddressRegistry::by_name(std::string_view name) const {
    for (unsigned i = 0; i < count_; ++i) {
        if (names_[i] == name)
            return at(i);
    }
    return std::nullopt;
}

const U256& BalanceMap::get(Address a) const {
    CWB_REQUIRE(contains(a));
    return value[a.index];
}

void BalanceMap::set(Address a, const U256& v) {
    CWB_REQUIRE(a.index < kMaxAddresses);
    present |= static_cast<std::uint8_t>(1u << a.index);
    value[a.index] = v;
}

void BalanceMap::erase(Address a) {
    CWB_REQUIRE(a.index < kMaxAddresses);
    present &= static_cast<std::uint8_t>(~(1u << a.index));
    value[a.index] = U256();
}

unsigned BalanceMap::size() const {
    unsigned n = 0;
    for (unsigned i = 0; i < kMaxAddresses; ++i)
        n += (present >> i) & 1u;
    return n;
}

WideNat sum_values(const BalanceMap& m) {
    WideNat total;
    for (unsigned i = 0; i < kMaxAddresses; ++i) {
        if ((m.present >> i) & 1u)
            total.add(m.value[i]);
    }
    return total;
}

WideNat transaction_fee(Gas max_gas, Gas gas_left, const U256& gas_price) {
    CWB_REQUIRE(gas_left <= max_gas);
    const std::uint64_t burned = max_gas - gas_left;
    WideNat fee;
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        const unsigned __int128 p = static_cast<unsigned __int128>(gas_price.limb[i]) * burned + carry;
        fee.limb[i] = static_cast<std::uint64_t>(p);
        carry = p >> 64;
    }
    fee.limb[4] = static_cast<std::uint64_t>(carry);
    return fee;
}

} // namespace cwb
