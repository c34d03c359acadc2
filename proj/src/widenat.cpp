// cwb: wide natural accumulator arithmetic.
// SPDX-License-Identifier: Apache-2.0
#include "cwb/widenat.hpp"

#include "cwb/check.hpp"

namespace cwb {

WideNat WideNat::from_u256(const U256& v) {
    WideNat r;
    for (int i = 0; i < 4; ++i)
        r.limb[i] = v.limb[i];
    return r;
}

bool WideNat::is_zero() const {
    for (const std::uint64_t l : limb)
        if (l != 0)
            return false;
    return true;
}

std::strong_ordering operator<=>(const WideNat& a, const WideNat& b) {
    for (int i = 6; i >= 0; --i) {
        if (a.limb[i] != b.limb[i])
            return a.limb[i] < b.limb[i] ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

void WideNat::add(const U256& v) {
    add(from_u256(v));
}

void WideNat::add(const WideNat& v) {
    unsigned __int128 carry = 0;
    for (int i = 0; i < 7; ++i) {
        const unsigned __int128 s = static_cast<unsigned __int128>(limb[i]) + v.limb[i] + carry;
        limb[i] = static_cast<std::uint64_t>(s);
        carry = s >> 64;
    }
    CWB_CHECK(carry == 0);
}

void WideNat::sub(const U256& v) {
    const WideNat w = from_u256(v);
    unsigned __int128 borrow = 0;
    for (int i = 0; i < 7; ++i) {
        const unsigned __int128 d = static_cast<unsigned __int128>(limb[i]) - w.limb[i] - borrow;
        limb[i] = static_cast<std::uint64_t>(d);
        borrow = (d >> 64) != 0 ? 1 : 0;
    }
    CWB_CHECK(borrow == 0);
}

namespace {

std::uint64_t divmod_small(WideNat& v, std::uint64_t divisor) {
    unsigned __int128 rem = 0;
    for (int i = 6; i >= 0; --i) {
        const unsigned __int128 cur = (rem << 64) | v.limb[i];
        v.limb[i] = static_cast<std::uint64_t>(cur / divisor);
        rem = cur % divisor;
    }
    return static_cast<std::uint64_t>(rem);
}

} // namespace

std::string to_dec_string(const WideNat& v) {
    if (v.is_zero())
        return "0";
    WideNat cur = v;
    std::string digits;
    while (!cur.is_zero())
        digits.push_back(static_cast<char>('0' + divmod_small(cur, 10)));
    return std::string(digits.rbegin(), digits.rend());
}

} // namespace cwb
