#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sln/ledger.hpp"
#include "sln/sln_model.hpp"

namespace sln {

// Everything one publish_link call appended: the object's root issue when
// this was the first transaction of the object, the link-state transaction
// itself, and any shortcut transactions sampled for this hop.
struct PublishResult {
    std::optional<BlockchainTransaction> bootstrap;
    BlockchainTransaction link_tx;
    std::vector<BlockchainTransaction> shortcuts;
};

/**
 * Reliability-gated link publishing.
 *
 * Each publish checks the source node's reliability against the halt
 * threshold, bootstraps the object chain from the process root on first
 * use, derives the asset ID (the publisher's longest held suffix extended
 * with the link target on first publish; the link's recorded asset
 * afterwards), validates the state transition against the process's active
 * schema, maps the new state's location to the paying/receiving accounts,
 * and finally samples shortcut transactions whenever the object moved to a
 * new node.
 */
class LinkPublisher {
public:
    struct Options {
        double halt_threshold = 0.0;
        // Reliability lookup for the gate (trustiness minus responsibility).
        // Unset means every node scores the default initial trustiness.
        std::function<double(const std::string&)> reliability;
        double default_reliability = 10.0;
        bool shortcuts_enabled = true;
        std::uint64_t shortcut_seed = 1;
    };

    explicit LinkPublisher(Ledger& ledger);
    LinkPublisher(Ledger& ledger, Options options);

    PublishResult publish_link(const std::string& process_root, const SemanticLink& link,
                               LinkState state,
                               const std::map<std::string, std::string>& attributes = {});

    // Publishes one Init per link; all links must share source and object.
    // Each asset gets the link's own target appended, so the k transactions
    // carry k distinct asset IDs.
    std::vector<PublishResult> publish_branch(const std::string& process_root,
                                              const std::vector<SemanticLink>& links);

    // Root-issues the object to `holder` if the object has no chain yet.
    std::optional<BlockchainTransaction> bootstrap_object(const std::string& process_root,
                                                          const std::string& base,
                                                          const std::string& holder);

    // The longest-suffix asset of `base` that `payer` received from another
    // account; the bare base ID when it holds none.
    ObjectId longest_suffix(const std::string& payer, const std::string& base) const;

    BlockchainTransaction publish_schema_rule(const std::string& process_root,
                                              const SchemaRule& rule);

    // Effective transition table for the process: per from-state the most
    // recently published rule, or the built-in row where none exists.
    std::vector<SchemaRule> load_active_schema(const std::string& process_root) const;

    const Options& options() const { return options_; }

private:
    double reliability_of(const std::string& node) const;

    Ledger& ledger_;
    Options options_;
};

} // namespace sln
