// cwb: wide natural accumulator for ghost bookkeeping.
// SPDX-License-Identifier: Apache-2.0
//
// The ghost counters (total minted supply, balance sums, fee totals) model
// unbounded naturals: they must keep growing past 2^256 without wrapping.
// 448 bits of headroom covers any sum this workbench can produce (bounded
// numbers of 256-bit additions); exceeding it is a workbench bug and aborts.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "cwb/u256.hpp"

namespace cwb {

// Little-endian limbs: limb[0] is least significant.
struct WideNat {
    std::array<std::uint64_t, 7> limb{};

    constexpr WideNat() = default;
    constexpr WideNat(std::uint64_t v) : limb{v, 0, 0, 0, 0, 0, 0} {} // NOLINT: implicit by design

    static WideNat from_u256(const U256& v);

    bool is_zero() const;

    friend constexpr bool operator==(const WideNat&, const WideNat&) = default;
    friend std::strong_ordering operator<=>(const WideNat& a, const WideNat& b);

    // In-place arithmetic; overflow past 448 bits or borrow below zero throws.
    void add(const U256& v);
    void add(const WideNat& v);
    void sub(const U256& v);
};

std::string to_dec_string(const WideNat& v);

} // namespace cwb
