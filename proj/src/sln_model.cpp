#include "sln/sln_model.hpp"

#include <algorithm>

#include "sln/errors.hpp"

namespace sln {

const char* link_state_name(LinkState s) noexcept {
    switch (s) {
    case LinkState::Init: return "Init";
    case LinkState::Transporting: return "Transporting";
    case LinkState::Succeeded: return "Succeeded";
    case LinkState::Failed: return "Failed";
    case LinkState::End: return "End";
    }
    return "?";
}

std::optional<LinkState> parse_link_state(const std::string& name) noexcept {
    for (LinkState s : all_link_states)
        if (name == link_state_name(s)) return s;
    return std::nullopt;
}

const char* location_kind_name(ObjectLocation::Kind k) noexcept {
    switch (k) {
    case ObjectLocation::Kind::AtSource: return "AtSource";
    case ObjectLocation::Kind::OnLink: return "OnLink";
    case ObjectLocation::Kind::AtTarget: return "AtTarget";
    case ObjectLocation::Kind::End: return "End";
    }
    return "?";
}

void SemanticLink::append_state(LinkState next) {
    if (state_history.empty()) {
        if (next != LinkState::Init)
            fail(errc::illegal_transition,
                 "link " + link_id + " must start at Init, not " + link_state_name(next));
    } else if (!validate_transition(state_history.back(), next)) {
        fail(errc::illegal_transition, "link " + link_id + ": " +
                                           link_state_name(state_history.back()) + " -> " +
                                           link_state_name(next));
    }
    state_history.push_back(next);
}

SemanticLink SemanticLink::with_history(SemanticLink link, std::vector<LinkState> history) {
    link.state_history.clear();
    for (LinkState s : history) link.append_state(s);
    return link;
}

ObjectLocation infer_object_location(const SemanticLink& link, LinkState state) {
    switch (state) {
    case LinkState::Init: return ObjectLocation::at_source(link.source);
    case LinkState::Transporting: return ObjectLocation::on_link(link.link_id);
    case LinkState::Succeeded: return ObjectLocation::at_target(link.target);
    case LinkState::Failed: return ObjectLocation::at_target(link.target);
    case LinkState::End: return ObjectLocation::end();
    }
    fail(errc::illegal_transition, "unknown state");
}

std::string host_mapping(const SemanticLink& link, const ObjectLocation& location,
                         const std::optional<ObjectLocation>& prev_location) {
    switch (location.kind) {
    case ObjectLocation::Kind::AtSource: return link.source;
    case ObjectLocation::Kind::OnLink: return link.source;
    case ObjectLocation::Kind::AtTarget: return link.target;
    case ObjectLocation::Kind::End:
        if (!prev_location || prev_location->kind == ObjectLocation::Kind::End)
            fail(errc::missing_previous_location,
                 "End location for link " + link.link_id + " needs a non-End previous location");
        return host_mapping(link, *prev_location, std::nullopt);
    }
    fail(errc::missing_previous_location, "unknown location");
}

std::vector<SchemaRule> default_schema() {
    return {
        SchemaRule::transition(LinkState::Init,
                               {LinkState::Transporting, LinkState::Failed, LinkState::End}),
        SchemaRule::transition(
            LinkState::Transporting,
            {LinkState::Transporting, LinkState::Succeeded, LinkState::Failed}),
        SchemaRule::transition(LinkState::Failed, {LinkState::End}),
        SchemaRule::transition(LinkState::Succeeded, {LinkState::End}),
    };
}

std::set<LinkState> legal_next_states(LinkState prev, const std::vector<SchemaRule>& rules) {
    // Latest published rule for a state wins over everything before it.
    for (auto it = rules.rbegin(); it != rules.rend(); ++it)
        if (it->kind == SchemaRule::Kind::StateTransition && it->from_state == prev)
            return it->to_states;
    for (const auto& rule : default_schema())
        if (rule.from_state == prev) return rule.to_states;
    return {};
}

bool validate_transition(LinkState prev, LinkState next, const std::vector<SchemaRule>& rules) {
    return legal_next_states(prev, rules).contains(next);
}

bool state_reachable(LinkState from, LinkState to, const std::vector<SchemaRule>& rules) {
    if (from == to) return true;
    std::set<LinkState> seen = {from};
    std::vector<LinkState> work = {from};
    while (!work.empty()) {
        LinkState cur = work.back();
        work.pop_back();
        for (LinkState next : legal_next_states(cur, rules)) {
            if (next == to) return true;
            if (seen.insert(next).second) work.push_back(next);
        }
    }
    return false;
}

namespace {

bool is_variable(const std::string& term) { return !term.empty() && term[0] == '?'; }

// Matches a pattern term against a concrete term, extending the binding.
// Terms in the matched tuple are treated as opaque (a stored "?x" only
// matches a literal "?x" or binds a rule variable).
bool match_term(const std::string& pat, const std::string& value,
                std::map<std::string, std::string>& binding) {
    if (is_variable(pat)) {
        auto it = binding.find(pat);
        if (it == binding.end()) {
            binding.emplace(pat, value);
            return true;
        }
        return it->second == value;
    }
    return pat == value;
}

bool match_pattern(const LinkPattern& pat, const LinkPattern& value,
                   std::map<std::string, std::string>& binding) {
    return match_term(pat.source, value.source, binding) &&
           match_term(pat.label, value.label, binding) &&
           match_term(pat.object, value.object, binding) &&
           match_term(pat.target, value.target, binding);
}

std::string substitute(const std::string& term, const std::map<std::string, std::string>& binding) {
    if (is_variable(term)) {
        auto it = binding.find(term);
        if (it != binding.end()) return it->second;
    }
    return term;
}

LinkPattern instantiate(const LinkPattern& pat, const std::map<std::string, std::string>& binding) {
    return {substitute(pat.source, binding), substitute(pat.label, binding),
            substitute(pat.object, binding), substitute(pat.target, binding)};
}

// Enumerates bindings of rule premises against the known set, emitting each
// instantiated conclusion.
void apply_rule(const SchemaRule& rule, const std::set<LinkPattern>& known, std::size_t premise_idx,
                std::map<std::string, std::string> binding, std::vector<LinkPattern>& out) {
    if (premise_idx == rule.premises.size()) {
        out.push_back(instantiate(rule.conclusion, binding));
        return;
    }
    for (const auto& candidate : known) {
        auto local = binding;
        if (match_pattern(rule.premises[premise_idx], candidate, local))
            apply_rule(rule, known, premise_idx + 1, std::move(local), out);
    }
}

} // namespace

std::set<LinkPattern> derive_implied_links(const std::set<LinkPattern>& links,
                                           const std::vector<SchemaRule>& rules) {
    std::set<LinkPattern> result = links;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& rule : rules) {
            if (rule.kind != SchemaRule::Kind::LinkImplication || rule.premises.empty()) continue;
            std::vector<LinkPattern> derived;
            apply_rule(rule, result, 0, {}, derived);
            for (auto& tuple : derived)
                if (result.insert(std::move(tuple)).second) changed = true;
        }
    }
    return result;
}

} // namespace sln
