// cwb: bounded-exhaustive exploration of transaction and adversary choices.
// SPDX-License-Identifier: Apache-2.0
//
// Enumerates every reachable world over sequences of up to max_transactions
// transactions, and inside each notifying transfer every decode-distinct
// resolution of the adversary's choices. Equal draws decode to equal
// behaviour, so each draw forks over canonical representatives (3 for the
// re-entry dispatch, 2 for booleans and verdicts, the domain size for
// addresses and amounts), capped by max_choice_value; a cut-off domain marks
// the report incomplete. Adversarial subtrees are memoized per (token state,
// gas): their branch counts, frame counts and terminal sets are exact over
// the full enumeration even though each distinct subtree runs once. Worlds
// deduplicate on executable state, so each is expanded once at its shallowest
// depth. A violating (world, transaction) root contributes one capped witness
// trace, chosen as the lexicographically least choice path to a terminal of
// the most severe conservation class, and stops extending its branch.
//
// Output is byte-identical across repeated runs and across worker counts.
#pragma once

#include <vector>

#include "cwb/trace.hpp"

namespace cwb {

// The canonical transaction domain explored from every world, in a fixed
// order: token models pair every caller with every recipient and amount for
// each method; the auction pairs callers with bid values plus the parameter
// free methods.
std::vector<Transaction> transaction_domain(const RunConfig& cfg);

// True when max_choice_value covers every decode domain the model draws from.
bool choice_domains_complete(const RunConfig& cfg);

Report explore(const RunConfig& cfg);

} // namespace cwb
