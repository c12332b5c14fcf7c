#include "sln/tracer.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "sln/errors.hpp"

namespace sln {
namespace {

// Whether `shorter`'s suffix path is a prefix of `longer`'s. Both IDs must
// share one base object; renderings then compare segment-for-segment as
// long as the cut falls on a separator (or the very end).
bool is_prefix(const ObjectId& shorter, const ObjectId& longer) {
    const std::string& s = shorter.str();
    const std::string& l = longer.str();
    if (s.size() > l.size()) return false;
    return l.compare(0, s.size(), s) == 0 && (l.size() == s.size() || l[s.size()] == '.');
}

// Keeps only the longest jump per branch: a new candidate replaces every
// entry whose suffix it extends (or equals — later appends win) and is
// dropped when an entry already extends it. Entries stay pairwise
// prefix-incomparable, so at most one entry can be related to a candidate.
void fold_into_jumps(std::vector<const BlockchainTransaction*>& jumps,
                     const BlockchainTransaction* tx) {
    for (const BlockchainTransaction*& entry : jumps) {
        if (is_prefix(entry->asset, tx->asset)) {
            entry = tx;
            return;
        }
        if (is_prefix(tx->asset, entry->asset)) return;
    }
    jumps.push_back(tx);
}

struct ArenaNode {
    std::string name;
    std::optional<BlockchainTransaction> via;
    std::vector<std::size_t> children;
};

std::optional<std::size_t> last_index_of(const std::vector<std::string>& seq,
                                         const std::string& name) {
    for (std::size_t i = seq.size(); i-- > 0;)
        if (seq[i] == name) return i;
    return std::nullopt;
}

std::vector<std::pair<std::string, LinkState>> states_published_at(const Ledger& ledger,
                                                                   const std::string& node,
                                                                   const std::string& base) {
    std::vector<std::pair<std::string, LinkState>> out;
    for (const BlockchainTransaction* tx : ledger.transactions_from_refs(node, base)) {
        if (tx->tag.kind != TxKind::Link || !tx->tag.state) continue;
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const auto& entry) { return entry.first == tx->tag.link_id; });
        if (it == out.end())
            out.emplace_back(tx->tag.link_id, *tx->tag.state);
        else
            it->second = *tx->tag.state;   // append order: the latest state wins
    }
    return out;
}

PathTree build_tree(const Ledger& ledger, const std::vector<ArenaNode>& arena, std::size_t index,
                    const std::string& base) {
    const ArenaNode& entry = arena[index];
    PathTree node;
    node.node = entry.name;
    node.via = entry.via;
    node.states_seen = states_published_at(ledger, entry.name, base);
    node.children.reserve(entry.children.size());
    for (std::size_t child : entry.children)
        node.children.push_back(build_tree(ledger, arena, child, base));
    return node;
}

void render_into(const PathTree& tree, std::size_t depth, std::string& out) {
    out.append(depth * 2, ' ');
    out += tree.node;
    if (!tree.states_seen.empty()) {
        out += " [";
        for (std::size_t i = 0; i < tree.states_seen.size(); ++i) {
            if (i) out += ", ";
            out += tree.states_seen[i].first;
            out += '=';
            out += link_state_name(tree.states_seen[i].second);
        }
        out += ']';
    }
    if (tree.via && tree.via->tag.kind == TxKind::Shortcut) out += " (via shortcut)";
    out += '\n';
    for (const PathTree& child : tree.children) render_into(child, depth + 1, out);
}

} // namespace

SemanticLink reconstruct_link(const Ledger& ledger, const std::string& base,
                              const std::string& link_id) {
    const std::vector<BlockchainTransaction> txs = ledger.link_transactions(base, link_id);
    if (txs.empty()) fail(errc::link_not_found, "no transactions for link " + link_id + " of " + base);
    SemanticLink link;
    link.link_id = link_id;
    link.link_type = txs.front().tag.link_type;
    link.object = base;
    link.source = txs.front().payer;
    link.target = txs.front().asset.path_empty() ? txs.front().payee
                                                 : std::string(txs.front().asset.last_segment());
    link.attributes = txs.front().tag.attributes;
    for (const BlockchainTransaction& tx : txs)
        if (tx.tag.state) link.state_history.push_back(*tx.tag.state);
    return link;
}

std::pair<LinkState, ObjectLocation> query_link_state(const Ledger& ledger,
                                                      const std::string& link_id,
                                                      const std::string& base) {
    const SemanticLink link = reconstruct_link(ledger, base, link_id);
    const LinkState latest = link.state_history.back();
    return {latest, infer_object_location(link, latest)};
}

TraceResult query_path(const Ledger& ledger, const std::string& process_root,
                       const std::string& base, const TraceOptions& options) {
    if (!ledger.has_account(process_root))
        fail(errc::process_not_found, "no such process root: " + process_root);

    std::vector<ArenaNode> arena;
    std::unordered_map<std::string, std::size_t> in_tree;
    std::unordered_set<std::string> scheduled;
    std::deque<std::size_t> worklist;

    arena.push_back({process_root, std::nullopt, {}});
    in_tree.emplace(process_root, 0);
    scheduled.insert(process_root);
    worklist.push_back(0);

    const auto first = ledger.first_issue(base);
    const std::string first_holder = first ? first->payee : std::string();

    std::size_t visits = 0;
    while (!worklist.empty()) {
        const std::size_t current = worklist.front();
        worklist.pop_front();
        ++visits;
        const std::string account = arena[current].name;

        std::vector<const BlockchainTransaction*> jumps;
        for (const BlockchainTransaction* tx : ledger.transactions_from_refs(account, base)) {
            const TxKind kind = tx->tag.kind;
            const bool transfer = kind == TxKind::Link || kind == TxKind::Bootstrap;
            const bool shortcut = kind == TxKind::Shortcut && options.use_shortcuts;
            if (!transfer && !shortcut) continue;
            fold_into_jumps(jumps, tx);
        }

        for (const BlockchainTransaction* jump_tx : jumps) {
            const BlockchainTransaction& jump = *jump_tx;
            std::vector<std::string> seq;
            seq.reserve(jump.asset.path_size() + 1);
            if (!first_holder.empty()) seq.push_back(first_holder);
            for (std::string_view hop : jump.asset.segments()) seq.emplace_back(hop);

            const auto account_pos = last_index_of(seq, account);
            const auto payee_pos = last_index_of(seq, jump.payee);
            if (!payee_pos) continue;
            const std::size_t from = account_pos ? *account_pos + 1 : 0;

            std::size_t at = current;
            for (std::size_t k = from; k <= *payee_pos; ++k) {
                const std::string& name = seq[k];
                std::size_t next;
                const auto known = in_tree.find(name);
                if (known != in_tree.end()) {
                    next = known->second;   // already placed: descend without re-attaching
                } else {
                    next = arena.size();
                    arena.push_back({name, jump, {}});
                    arena[at].children.push_back(next);
                    in_tree.emplace(name, next);
                }
                at = next;
            }

            if (!scheduled.count(jump.payee)) {
                const auto target = in_tree.find(jump.payee);
                if (target != in_tree.end()) {
                    scheduled.insert(jump.payee);
                    worklist.push_back(target->second);
                }
            }
        }
    }

    TraceResult result;
    result.root = build_tree(ledger, arena, 0, base);
    result.visits = visits;
    return result;
}

std::vector<TraceResult> trace_process(const Ledger& ledger, const std::string& process_root,
                                       const TraceOptions& options) {
    if (!ledger.has_account(process_root))
        fail(errc::process_not_found, "no such process root: " + process_root);
    std::vector<TraceResult> out;
    for (const std::string& base : ledger.objects_issued_by(process_root)) {
        if (base.find('#') != std::string::npos) continue;   // internal schema/score chains
        out.push_back(query_path(ledger, process_root, base, options));
    }
    return out;
}

std::vector<std::pair<std::string, LinkState>> path_states(const PathTree& tree) {
    std::vector<std::pair<std::string, LinkState>> collected;
    std::vector<const PathTree*> stack{&tree};
    while (!stack.empty()) {
        const PathTree* node = stack.back();
        stack.pop_back();
        collected.insert(collected.end(), node->states_seen.begin(), node->states_seen.end());
        for (std::size_t i = node->children.size(); i-- > 0;) stack.push_back(&node->children[i]);
    }
    // keep only the deepest (= last emitted) entry per link
    std::vector<std::pair<std::string, LinkState>> out;
    for (std::size_t i = collected.size(); i-- > 0;) {
        const auto& entry = collected[i];
        if (std::none_of(out.begin(), out.end(),
                         [&](const auto& seen) { return seen.first == entry.first; }))
            out.push_back(entry);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string render_tree(const PathTree& tree) {
    std::string out;
    render_into(tree, 0, out);
    return out;
}

} // namespace sln
