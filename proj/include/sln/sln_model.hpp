#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sln {

// ---------------------------------------------------------------------------
// Link states and the legal-transition table
// ---------------------------------------------------------------------------

enum class LinkState { Init, Transporting, Succeeded, Failed, End };

inline constexpr std::array<LinkState, 5> all_link_states = {
    LinkState::Init, LinkState::Transporting, LinkState::Succeeded, LinkState::Failed,
    LinkState::End};

const char* link_state_name(LinkState s) noexcept;
std::optional<LinkState> parse_link_state(const std::string& name) noexcept;

// ---------------------------------------------------------------------------
// Links and object locations
// ---------------------------------------------------------------------------

/**
 * A directed transport link: the object travels from `source` to `target`
 * over link `link_id`. `state_history` is optional bookkeeping for callers
 * that track a link's life in memory; append_state() only accepts histories
 * that start at Init and follow the legal-transition table.
 */
struct SemanticLink {
    std::string link_id;
    std::string link_type;
    std::string source;
    std::string target;
    std::string object;                    // base object ID carried over this link
    std::map<std::string, std::string> attributes;
    std::vector<LinkState> state_history;

    void append_state(LinkState next);     // throws IllegalTransition
    static SemanticLink with_history(SemanticLink link, std::vector<LinkState> history);
};

struct ObjectLocation {
    enum class Kind { AtSource, OnLink, AtTarget, End };

    Kind kind = Kind::End;
    std::string at;   // account for AtSource/AtTarget, link ID for OnLink, empty for End

    bool operator==(const ObjectLocation&) const = default;

    static ObjectLocation at_source(std::string node) { return {Kind::AtSource, std::move(node)}; }
    static ObjectLocation on_link(std::string link) { return {Kind::OnLink, std::move(link)}; }
    static ObjectLocation at_target(std::string node) { return {Kind::AtTarget, std::move(node)}; }
    static ObjectLocation end() { return {Kind::End, {}}; }
};

const char* location_kind_name(ObjectLocation::Kind k) noexcept;

// Where the object sits while the link is in the given state.
ObjectLocation infer_object_location(const SemanticLink& link, LinkState state);

// The account that stores the transaction for a location. End defers to the
// previous location's host, so it requires prev and prev must not be End.
std::string host_mapping(const SemanticLink& link, const ObjectLocation& location,
                         const std::optional<ObjectLocation>& prev_location = std::nullopt);

// ---------------------------------------------------------------------------
// Schema rules
// ---------------------------------------------------------------------------

/**
 * A published schema rule. Two kinds:
 *  - StateTransition: replaces the legal next-state row for `from_state`.
 *  - LinkImplication: premises/conclusion patterns over link tuples
 *    (source, state_or_type, object, target); terms starting with '?' are
 *    variables, anything else matches literally.
 */
struct LinkPattern {
    std::string source;
    std::string label;    // state or link type term
    std::string object;
    std::string target;

    bool operator==(const LinkPattern&) const = default;
    auto operator<=>(const LinkPattern&) const = default;
};

struct SchemaRule {
    enum class Kind { StateTransition, LinkImplication };

    Kind kind = Kind::StateTransition;

    // StateTransition fields
    LinkState from_state = LinkState::Init;
    std::set<LinkState> to_states;

    // LinkImplication fields
    std::vector<LinkPattern> premises;
    LinkPattern conclusion;

    static SchemaRule transition(LinkState from, std::set<LinkState> to) {
        SchemaRule r;
        r.kind = Kind::StateTransition;
        r.from_state = from;
        r.to_states = std::move(to);
        return r;
    }

    static SchemaRule implication(std::vector<LinkPattern> premises, LinkPattern conclusion) {
        SchemaRule r;
        r.kind = Kind::LinkImplication;
        r.premises = std::move(premises);
        r.conclusion = conclusion;
        return r;
    }
};

// The built-in transition table: Init -> {Transporting, Failed, End},
// Transporting -> {Transporting, Succeeded, Failed}, Failed -> {End},
// Succeeded -> {End}. End has no successors.
std::vector<SchemaRule> default_schema();

// Next states allowed after `prev` under the given rules. The last
// StateTransition rule for `prev` wins; with none, the built-in row applies.
std::set<LinkState> legal_next_states(LinkState prev, const std::vector<SchemaRule>& rules = {});

bool validate_transition(LinkState prev, LinkState next, const std::vector<SchemaRule>& rules = {});

// Reflexive-transitive closure of one-step legality.
bool state_reachable(LinkState from, LinkState to, const std::vector<SchemaRule>& rules = {});

// Closes `links` under the LinkImplication rules (fixed point, exact-tuple
// dedup). Variables bound by premises are substituted into conclusions;
// unbound conclusion variables stay as written.
std::set<LinkPattern> derive_implied_links(const std::set<LinkPattern>& links,
                                           const std::vector<SchemaRule>& rules);

} // namespace sln
