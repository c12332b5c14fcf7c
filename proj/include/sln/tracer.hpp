#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sln/ledger.hpp"
#include "sln/sln_model.hpp"

namespace sln {

// One node of a trace: the account, the transaction that first reached it
// (absent only at the root), and the latest state of every link this
// account published for the traced object.
struct PathTree {
    std::string node;
    std::optional<BlockchainTransaction> via;
    std::vector<std::pair<std::string, LinkState>> states_seen;
    std::vector<PathTree> children;
};

struct TraceResult {
    PathTree root;
    std::size_t visits = 0;   // distinct accounts whose transactions were scanned
};

struct TraceOptions {
    bool use_shortcuts = true;
};

// Latest state of a link plus the object's location derived from it.
std::pair<LinkState, ObjectLocation> query_link_state(const Ledger& ledger,
                                                      const std::string& link_id,
                                                      const std::string& base);

// Rebuilds the link's endpoints, type and state history from its ledger
// transactions.
SemanticLink reconstruct_link(const Ledger& ledger, const std::string& base,
                              const std::string& link_id);

/**
 * Walks the object's transfer graph from the process root. Each visited
 * account contributes its outgoing transactions of the object; among
 * alternatives whose suffix paths extend one another only the longest jump
 * survives (latest append wins on ties), so shortcut transactions skip the
 * accounts between publisher and payee. Skipped accounts still enter the
 * tree — every jump is expanded into the node sequence its suffix records —
 * but only jump targets are visited, which is what makes shortcut queries
 * cheaper than hop-by-hop walks while returning the same node set.
 */
TraceResult query_path(const Ledger& ledger, const std::string& process_root,
                       const std::string& base, const TraceOptions& options = {});

// One trace per object issued by the root, skipping internal '#' objects.
std::vector<TraceResult> trace_process(const Ledger& ledger, const std::string& process_root,
                                       const TraceOptions& options = {});

// Depth-first (link, latest state) pairs over the tree; when a link shows
// up more than once the deepest occurrence wins.
std::vector<std::pair<std::string, LinkState>> path_states(const PathTree& tree);

// Indented plain-text rendering for terminal output.
std::string render_tree(const PathTree& tree);

} // namespace sln
