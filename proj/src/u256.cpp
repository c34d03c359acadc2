// cwb: 256-bit unsigned integer arithmetic.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/u256.hpp"

#include "cwb/check.hpp"

namespace cwb {

AddResult add_with_carry(const U256& a, const U256& b) {
    U256 r;
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        const unsigned __int128 s = static_cast<unsigned __int128>(a.limb[i]) + b.limb[i] + carry;
        r.limb[i] = static_cast<std::uint64_t>(s);
        carry = s >> 64;
    }
    return {r, carry != 0};
}

std::optional<U256> checked_add(const U256& a, const U256& b) {
    const AddResult s = add_with_carry(a, b);
    if (s.carry)
        return std::nullopt;
    return s.value;
}

std::optional<U256> checked_sub(const U256& a, const U256& b) {
    U256 r;
    unsigned __int128 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        const unsigned __int128 d =
            static_cast<unsigned __int128>(a.limb[i]) - b.limb[i] - borrow;
        r.limb[i] = static_cast<std::uint64_t>(d);
        borrow = (d >> 64) != 0 ? 1 : 0;
    }
    if (borrow != 0)
        return std::nullopt;
    return r;
}

U256 wrapping_add(const U256& a, const U256& b) {
    return add_with_carry(a, b).value;
}

std::optional<U256> checked_mul_small(const U256& a, std::uint64_t b) {
    U256 r;
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        const unsigned __int128 p = static_cast<unsigned __int128>(a.limb[i]) * b + carry;
        r.limb[i] = static_cast<std::uint64_t>(p);
        carry = p >> 64;
    }
    if (carry != 0)
        return std::nullopt;
    return r;
}

namespace {

// Divide in place by a small divisor, returning the remainder.
std::uint64_t divmod_small(U256& v, std::uint64_t divisor) {
    CWB_REQUIRE(divisor != 0);
    unsigned __int128 rem = 0;
    for (int i = 3; i >= 0; --i) {
        const unsigned __int128 cur = (rem << 64) | v.limb[i];
        v.limb[i] = static_cast<std::uint64_t>(cur / divisor);
        rem = cur % divisor;
    }
    return static_cast<std::uint64_t>(rem);
}

} // namespace

std::string to_dec_string(const U256& v) {
    if (v.is_zero())
        return "0";
    U256 cur = v;
    std::string digits;
    while (!cur.is_zero()) {
        digits.push_back(static_cast<char>('0' + divmod_small(cur, 10)));
    }
    return std::string(digits.rbegin(), digits.rend());
}

std::optional<U256> u256_from_dec(std::string_view s) {
    if (s == "max" || s == "MAX")
        return U256::max();
    if (s.empty())
        return std::nullopt;
    U256 acc;
    for (const char c : s) {
        if (c < '0' || c > '9')
            return std::nullopt;
        const auto times10 = checked_mul_small(acc, 10);
        if (!times10)
            return std::nullopt;
        const auto next = checked_add(*times10, U256(static_cast<std::uint64_t>(c - '0')));
        if (!next)
            return std::nullopt;
        acc = *next;
    }
    return acc;
}

std::string to_hex_string(const U256& v) {
    static const char* hexdig = "0123456789abcdef";
    std::string out = "0x";
    bool leading = true;
    for (int i = 3; i >= 0; --i) {
        for (int shift = 60; shift >= 0; shift -= 4) {
            const unsigned nib = (v.limb[i] >> shift) & 0xf;
            if (leading && nib == 0 && !(i == 0 && shift == 0))
                continue;
            leading = false;
            out.push_back(hexdig[nib]);
        }
    }
    return out;
}

std::optional<U256> u256_from_hex(std::string_view s) {
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
        s.remove_prefix(2);
    if (s.empty() || s.size() > 64)
        return std::nullopt;
    U256 acc;
    for (const char c : s) {
        unsigned nib = 0;
        if (c >= '0' && c <= '9')
            nib = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f')
            nib = static_cast<unsigned>(c - 'a') + 10;
        else if (c >= 'A' && c <= 'F')
            nib = static_cast<unsigned>(c - 'A') + 10;
        else
            return std::nullopt;
        // Shift the accumulator left one nibble and add.
        unsigned carry_nib = nib;
        for (int i = 0; i < 4; ++i) {
            const std::uint64_t hi = acc.limb[i] >> 60;
            acc.limb[i] = (acc.limb[i] << 4) | carry_nib;
            carry_nib = static_cast<unsigned>(hi);
        }
    }
    return acc;
}

} // namespace cwb
