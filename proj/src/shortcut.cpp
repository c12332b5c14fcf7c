#include "sln/shortcut.hpp"

#include <algorithm>

#include "sln/rng.hpp"

namespace sln {

std::vector<BlockchainTransaction> add_shortcuts(Ledger& ledger, const ObjectId& asset,
                                                 const std::string& payee, std::uint64_t seed) {
    std::vector<BlockchainTransaction> published;
    if (asset.path_empty()) return published;
    const auto first = ledger.first_issue(asset.base());
    if (!first) return published;

    const std::vector<std::string_view> hops = asset.segments();
    std::vector<std::string_view> before;   // nodes ahead of the payee, in path order
    before.reserve(hops.size());
    before.push_back(first->payee);
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) before.push_back(hops[i]);

    const std::size_t l = before.size();
    const RngStream stream(seed, asset.base(), l);   // one sub-stream per hop
    for (std::size_t i = 1; i <= l; ++i) {
        const std::string_view node = before[i - 1];
        const std::size_t distance = l - i + 1;
        if (stream.uniform(i) >= 1.0 / static_cast<double>(distance)) continue;
        if (node == payee) continue;
        if (ledger.has_transaction(node, payee, asset.base(), TxKind::Shortcut)) continue;
        TagPayload tag;
        tag.kind = TxKind::Shortcut;
        published.push_back(ledger.publish_transaction(std::string(node), payee, asset, tag));
    }
    return published;
}

std::vector<std::pair<std::string, std::size_t>> shortcut_targets(const Ledger& ledger,
                                                                  const std::string& node,
                                                                  const std::string& base) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const BlockchainTransaction* tx : ledger.transactions_from_refs(node, base)) {
        if (tx->tag.kind != TxKind::Shortcut) continue;
        out.emplace_back(tx->payee, tx->asset.path_size());
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

} // namespace sln
