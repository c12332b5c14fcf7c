#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sln/ledger.hpp"

namespace sln {

/**
 * Samples shortcut transactions for one hop. `asset` is the suffixed object
 * ID just transferred to `payee` (so payee is the last suffix element). The
 * candidate publishers are every node the object passed through before the
 * payee — the chain's first holder plus all suffix nodes but the last. The
 * candidate at distance s from the payee publishes a shortcut transaction
 * to the payee with probability 1/s, so the immediate predecessor always
 * does and the path start rarely does. Sampling is a pure function of
 * (seed, base object, hop index, candidate index); an exact (payer, payee)
 * shortcut duplicate is never re-published.
 */
std::vector<BlockchainTransaction> add_shortcuts(Ledger& ledger, const ObjectId& asset,
                                                 const std::string& payee, std::uint64_t seed);

// All shortcut destinations recorded at `node` for the object, paired with
// the suffix length at publish time, sorted by descending jump length.
std::vector<std::pair<std::string, std::size_t>> shortcut_targets(const Ledger& ledger,
                                                                  const std::string& node,
                                                                  const std::string& base);

} // namespace sln
