// cwb: contract-workbench runtime assertion support.
// SPDX-License-Identifier: Apache-2.0
//
// Design-by-contract style checks for programmer errors (bad indices, broken
// internal invariants). These are NOT the modelled contract's Revert guards:
// a failed CWB_* check is a bug in the workbench or its caller, so it throws.
#pragma once

#include <stdexcept>
#include <string>

namespace cwb {

struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

namespace detail {
[[noreturn]] inline void fail_check(const char* kind, const char* cond, const char* file, int line) {
    throw ContractViolation(std::string(kind) + " failed: " + cond + " at " + file + ":" +
                            std::to_string(line));
}
} // namespace detail

} // namespace cwb

// Precondition on the caller.
#define CWB_REQUIRE(cond) \
    ((cond) ? void(0) : ::cwb::detail::fail_check("precondition", #cond, __FILE__, __LINE__))

// Postcondition / result guarantee.
#define CWB_ENSURE(cond) \
    ((cond) ? void(0) : ::cwb::detail::fail_check("postcondition", #cond, __FILE__, __LINE__))

// Internal consistency check.
#define CWB_CHECK(cond) \
    ((cond) ? void(0) : ::cwb::detail::fail_check("invariant", #cond, __FILE__, __LINE__))
