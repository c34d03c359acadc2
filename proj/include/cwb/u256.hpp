// cwb: 256-bit unsigned integers with checked and wrapping arithmetic.
// SPDX-License-Identifier: Apache-2.0
//
// Token balances use the checked operations (overflow is a guard failure,
// never silent wraparound); the bytecode interpreter uses the wrapping ones.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cwb {

// Little-endian limbs: limb[0] is least significant.
struct U256 {
    std::array<std::uint64_t, 4> limb{};

    constexpr U256() = default;
    constexpr U256(std::uint64_t v) : limb{v, 0, 0, 0} {} // NOLINT: implicit by design

    static constexpr U256 max() {
        U256 r;
        r.limb = {~0ull, ~0ull, ~0ull, ~0ull};
        return r;
    }

    constexpr bool is_zero() const { return limb[0] == 0 && limb[1] == 0 && limb[2] == 0 && limb[3] == 0; }

    friend constexpr bool operator==(const U256&, const U256&) = default;

    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i])
                return a.limb[i] < b.limb[i] ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }
};

// Sum with carry-out flag; the building block for both arithmetic flavours.
struct AddResult {
    U256 value;
    bool carry;
};

AddResult add_with_carry(const U256& a, const U256& b);

// nullopt on overflow / underflow. State-machine arithmetic never wraps.
std::optional<U256> checked_add(const U256& a, const U256& b);
std::optional<U256> checked_sub(const U256& a, const U256& b);

// Modulo-2^256 arithmetic for the bytecode interpreter.
U256 wrapping_add(const U256& a, const U256& b);

// Multiply by a 64-bit factor; nullopt on overflow past 2^256.
std::optional<U256> checked_mul_small(const U256& a, std::uint64_t b);

// Decimal round-trip. Parsing accepts optional surrounding whitespace-free
// pure digit strings plus the alias "max" for 2^256 - 1.
std::string to_dec_string(const U256& v);
std::optional<U256> u256_from_dec(std::string_view s);

// Hex round-trip ("0x" prefix optional on parse, always emitted on print).
std::string to_hex_string(const U256& v);
std::optional<U256> u256_from_hex(std::string_view s);

// Fits in 64 bits? Convenience for interpreter offsets.
inline bool fits_u64(const U256& v) { return v.limb[1] == 0 && v.limb[2] == 0 && v.limb[3] == 0; }

} // namespace cwb
