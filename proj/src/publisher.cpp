#include "sln/publisher.hpp"

#include <algorithm>

#include "sln/errors.hpp"
#include "sln/shortcut.hpp"

namespace sln {
namespace {

std::string schema_object(const std::string& root, LinkState from) {
    return root + "#schema#" + link_state_name(from);
}

std::string state_account(const std::string& root, LinkState s) {
    return root + "#st#" + link_state_name(s);
}

std::string joined_state_names(const std::set<LinkState>& states) {
    std::string joined;
    for (LinkState s : all_link_states) {
        if (!states.count(s)) continue;
        if (!joined.empty()) joined += '+';
        joined += link_state_name(s);
    }
    return joined;
}

std::string state_set_account(const std::string& root, const std::set<LinkState>& states) {
    return root + "#st#" + joined_state_names(states);
}

} // namespace

LinkPublisher::LinkPublisher(Ledger& ledger) : LinkPublisher(ledger, Options{}) {}

LinkPublisher::LinkPublisher(Ledger& ledger, Options options)
    : ledger_(ledger), options_(std::move(options)) {}

double LinkPublisher::reliability_of(const std::string& node) const {
    return options_.reliability ? options_.reliability(node) : options_.default_reliability;
}

std::optional<BlockchainTransaction> LinkPublisher::bootstrap_object(
    const std::string& process_root, const std::string& base, const std::string& holder) {
    if (ledger_.first_issue(base)) return std::nullopt;
    ledger_.ensure_account(process_root);
    ledger_.ensure_account(holder);
    TagPayload tag;
    tag.kind = TxKind::Bootstrap;
    tag.state = LinkState::Succeeded;
    return ledger_.publish_transaction(process_root, holder, ObjectId(base), tag);
}

ObjectId LinkPublisher::longest_suffix(const std::string& payer, const std::string& base) const {
    const BlockchainTransaction* best = nullptr;
    for (const BlockchainTransaction* tx : ledger_.received_by_refs(payer, base)) {
        const TxKind kind = tx->tag.kind;
        if (kind != TxKind::Link && kind != TxKind::Bootstrap) continue;
        if (tx->payer == tx->payee) continue;   // only assets received from another node are held
        if (!best || tx->asset.path_size() >= best->asset.path_size())
            best = tx;                          // ties break toward the latest append
    }
    return best ? best->asset : ObjectId(base);
}

PublishResult LinkPublisher::publish_link(const std::string& process_root,
                                          const SemanticLink& link, LinkState state,
                                          const std::map<std::string, std::string>& attributes) {
    check_identifier(link.source, "link source");
    check_identifier(link.target, "link target");
    check_identifier(link.object, "object");
    if (link.link_id.empty()) fail(errc::bad_identifier, "link ID must not be empty");

    const double score = reliability_of(link.source);
    if (score < options_.halt_threshold)
        fail(errc::publisher_halted, "reliability " + std::to_string(score) + " of " +
                                         link.source + " is below threshold " +
                                         std::to_string(options_.halt_threshold));

    PublishResult result;
    result.bootstrap = bootstrap_object(process_root, link.object, link.source);

    const BlockchainTransaction* latest_link =
        ledger_.latest_link_transaction(link.object, link.link_id);

    ObjectId asset;
    std::string payer;
    std::optional<ObjectLocation> prev_location;
    if (!latest_link) {
        if (state != LinkState::Init)
            fail(errc::illegal_transition, "first state of link " + link.link_id + " must be " +
                                               link_state_name(LinkState::Init) + ", got " +
                                               link_state_name(state));
        asset = longest_suffix(link.source, link.object).extended(link.target);
        payer = link.source;
    } else {
        const BlockchainTransaction& latest = *latest_link;
        if (!latest.tag.state)
            fail(errc::parse_error, "link transaction without a state: " + link.link_id);
        const LinkState prev_state = *latest.tag.state;
        const std::vector<SchemaRule> rules = load_active_schema(process_root);
        if (!validate_transition(prev_state, state, rules))
            fail(errc::illegal_transition, std::string(link_state_name(prev_state)) + " -> " +
                                               link_state_name(state) + " is not allowed for link " +
                                               link.link_id);
        asset = latest.asset;
        payer = latest.payee;   // the current holder: host of the previous location
        prev_location = infer_object_location(link, prev_state);
    }

    const ObjectLocation location = infer_object_location(link, state);
    const std::string payee = host_mapping(link, location, prev_location);
    ledger_.ensure_account(payer);
    ledger_.ensure_account(payee);

    TagPayload tag;
    tag.kind = TxKind::Link;
    tag.link_id = link.link_id;
    tag.link_type = link.link_type;
    tag.state = state;
    tag.attributes = link.attributes;
    for (const auto& [key, value] : attributes) tag.attributes[key] = value;

    result.link_tx = ledger_.publish_transaction(payer, payee, asset, tag);

    if (options_.shortcuts_enabled && result.link_tx.payer != result.link_tx.payee &&
        !asset.path_empty()) {
        result.shortcuts = add_shortcuts(ledger_, asset, payee, options_.shortcut_seed);
    }
    return result;
}

std::vector<PublishResult> LinkPublisher::publish_branch(const std::string& process_root,
                                                         const std::vector<SemanticLink>& links) {
    if (links.empty()) return {};
    for (const SemanticLink& link : links) {
        if (link.source != links.front().source || link.object != links.front().object)
            fail(errc::bad_identifier, "branch links must share one source and one object");
    }
    std::vector<PublishResult> out;
    out.reserve(links.size());
    for (const SemanticLink& link : links)
        out.push_back(publish_link(process_root, link, LinkState::Init));
    return out;
}

BlockchainTransaction LinkPublisher::publish_schema_rule(const std::string& process_root,
                                                         const SchemaRule& rule) {
    if (!ledger_.has_account(process_root))
        fail(errc::account_not_found, "no such process root: " + process_root);
    if (rule.kind != SchemaRule::Kind::StateTransition)
        fail(errc::invalid_argument, "only state-transition rules are published to the chain");
    if (rule.to_states.empty())
        fail(errc::invalid_argument, "a transition rule needs at least one target state");

    const std::string base = schema_object(process_root, rule.from_state);
    const std::string from_account = state_account(process_root, rule.from_state);
    const std::string to_account = state_set_account(process_root, rule.to_states);
    ledger_.ensure_account(from_account);
    ledger_.ensure_account(to_account);

    if (!ledger_.first_issue(base)) {
        TagPayload boot;
        boot.kind = TxKind::Bootstrap;
        boot.state = LinkState::Succeeded;
        ledger_.publish_transaction(process_root, from_account, ObjectId(base), boot);
    }

    TagPayload tag;
    tag.kind = TxKind::Rule;
    tag.attributes["from"] = link_state_name(rule.from_state);
    tag.attributes["to"] = joined_state_names(rule.to_states);
    return ledger_.publish_transaction(from_account, to_account, ObjectId(base), tag);
}

std::vector<SchemaRule> LinkPublisher::load_active_schema(const std::string& process_root) const {
    std::vector<SchemaRule> table;
    const std::vector<SchemaRule> defaults = default_schema();
    for (LinkState from : all_link_states) {
        std::optional<SchemaRule> active;
        for (const BlockchainTransaction& tx :
             ledger_.transactions_for_object(schema_object(process_root, from))) {
            if (tx.tag.kind != TxKind::Rule) continue;
            auto to_it = tx.tag.attributes.find("to");
            if (to_it == tx.tag.attributes.end()) continue;
            std::set<LinkState> to;
            std::string name;
            for (std::size_t i = 0; i <= to_it->second.size(); ++i) {
                if (i == to_it->second.size() || to_it->second[i] == '+') {
                    if (auto s = parse_link_state(name)) to.insert(*s);
                    name.clear();
                } else {
                    name += to_it->second[i];
                }
            }
            if (!to.empty()) active = SchemaRule::transition(from, std::move(to));
        }
        if (active) {
            table.push_back(std::move(*active));
        } else {
            for (const SchemaRule& d : defaults)
                if (d.from_state == from) table.push_back(d);
        }
    }
    return table;
}

} // namespace sln
