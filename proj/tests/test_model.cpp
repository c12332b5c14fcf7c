#include "doctest.h"

#include <map>
#include <set>
#include <vector>

#include "sln/errors.hpp"
#include "sln/rng.hpp"
#include "sln/sln_model.hpp"

using namespace sln;

namespace {

// Independent statement of the legal-transition table, written as data so
// the production rule set is checked against a second formulation.
bool table_allows(LinkState prev, LinkState next) {
    using S = LinkState;
    static const std::map<S, std::set<S>> table = {
        {S::Init, {S::Transporting, S::Failed, S::End}},
        {S::Transporting, {S::Transporting, S::Succeeded, S::Failed}},
        {S::Succeeded, {S::End}},
        {S::Failed, {S::End}},
        {S::End, {}},
    };
    return table.at(prev).count(next) != 0;
}

SemanticLink make_link() {
    SemanticLink link;
    link.link_id = "l1";
    link.link_type = "transport";
    link.source = "u";
    link.target = "v";
    link.object = "d";
    return link;
}

} // namespace

TEST_CASE("all 25 state pairs match the transition table") {
    for (LinkState prev : all_link_states)
        for (LinkState next : all_link_states) {
            CAPTURE(link_state_name(prev));
            CAPTURE(link_state_name(next));
            CHECK(validate_transition(prev, next) == table_allows(prev, next));
        }
}

TEST_CASE("default schema has one row per non-terminal state") {
    const auto rules = default_schema();
    REQUIRE(rules.size() == 4);
    std::set<LinkState> froms;
    for (const auto& r : rules) {
        CHECK(r.kind == SchemaRule::Kind::StateTransition);
        froms.insert(r.from_state);
    }
    CHECK(froms == std::set<LinkState>{LinkState::Init, LinkState::Transporting,
                                       LinkState::Succeeded, LinkState::Failed});
}

TEST_CASE("random walks are accepted exactly when every step is legal") {
    RngStream rng(2024, "walks");
    std::uint64_t counter = 0;
    for (int walk = 0; walk < 500; ++walk) {
        std::vector<LinkState> steps{LinkState::Init};
        const int len = 1 + static_cast<int>(rng.range(counter++, 0, 5));
        for (int i = 0; i < len; ++i)
            steps.push_back(all_link_states[rng.range(counter++, 0, 4)]);

        bool legal = true;
        for (std::size_t i = 0; i + 1 < steps.size(); ++i)
            legal = legal && table_allows(steps[i], steps[i + 1]);

        SemanticLink link = make_link();
        bool accepted = true;
        try {
            for (std::size_t i = 0; i < steps.size(); ++i) link.append_state(steps[i]);
        } catch (const Error& e) {
            CHECK(e.code() == errc::illegal_transition);
            accepted = false;
        }
        CHECK(accepted == legal);
    }
}

TEST_CASE("state_reachable is the closure of single steps") {
    using S = LinkState;
    CHECK(state_reachable(S::Init, S::End));
    CHECK(state_reachable(S::Init, S::Succeeded));
    CHECK(state_reachable(S::Transporting, S::End));
    CHECK_FALSE(state_reachable(S::End, S::Init));
    CHECK_FALSE(state_reachable(S::Succeeded, S::Transporting));
    CHECK(state_reachable(S::Failed, S::Failed));   // reflexive
}

TEST_CASE("object location follows the state") {
    const SemanticLink link = make_link();
    using K = ObjectLocation::Kind;
    CHECK(infer_object_location(link, LinkState::Init) == ObjectLocation{K::AtSource, "u"});
    CHECK(infer_object_location(link, LinkState::Transporting) == ObjectLocation{K::OnLink, "l1"});
    CHECK(infer_object_location(link, LinkState::Succeeded) == ObjectLocation{K::AtTarget, "v"});
    CHECK(infer_object_location(link, LinkState::Failed) == ObjectLocation{K::AtTarget, "v"});
    CHECK(infer_object_location(link, LinkState::End) == ObjectLocation::end());
}

TEST_CASE("host mapping stores source-side states on u and target-side on v") {
    const SemanticLink link = make_link();
    CHECK(host_mapping(link, infer_object_location(link, LinkState::Init)) == "u");
    CHECK(host_mapping(link, infer_object_location(link, LinkState::Transporting)) == "u");
    CHECK(host_mapping(link, infer_object_location(link, LinkState::Succeeded)) == "v");
    CHECK(host_mapping(link, infer_object_location(link, LinkState::Failed)) == "v");
}

TEST_CASE("End is hosted wherever the object last was") {
    const SemanticLink link = make_link();
    const auto end_loc = ObjectLocation::end();
    CHECK(host_mapping(link, end_loc, infer_object_location(link, LinkState::Init)) == "u");
    CHECK(host_mapping(link, end_loc, infer_object_location(link, LinkState::Succeeded)) == "v");
    CHECK(host_mapping(link, end_loc, infer_object_location(link, LinkState::Failed)) == "v");

    CHECK_THROWS_AS(host_mapping(link, end_loc), Error);                       // no previous
    CHECK_THROWS_AS(host_mapping(link, end_loc, ObjectLocation::end()), Error); // End after End
}

TEST_CASE("a published rule overrides exactly its from-state row") {
    auto rules = default_schema();
    rules.push_back(SchemaRule::transition(LinkState::Init, {LinkState::Succeeded}));

    CHECK(validate_transition(LinkState::Init, LinkState::Succeeded, rules));
    CHECK_FALSE(validate_transition(LinkState::Init, LinkState::Transporting, rules));
    // Other rows keep their defaults.
    CHECK(validate_transition(LinkState::Transporting, LinkState::Succeeded, rules));
    CHECK_FALSE(validate_transition(LinkState::Succeeded, LinkState::Transporting, rules));
}

TEST_CASE("the latest rule for a from-state wins") {
    std::vector<SchemaRule> rules;
    rules.push_back(SchemaRule::transition(LinkState::Init, {LinkState::End}));
    rules.push_back(SchemaRule::transition(LinkState::Init, {LinkState::Failed}));
    CHECK(legal_next_states(LinkState::Init, rules) == std::set<LinkState>{LinkState::Failed});
}

namespace {

// Reference fixed-point closure: repeatedly instantiate every rule against
// every premise-sized tuple of known links until nothing new appears.
std::set<LinkPattern> naive_closure(std::set<LinkPattern> links,
                                    const std::vector<SchemaRule>& rules) {
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& rule : rules) {
            if (rule.kind != SchemaRule::Kind::LinkImplication) continue;
            // Try every assignment of known links to the rule's premises.
            std::vector<const LinkPattern*> pool;
            for (const auto& l : links) pool.push_back(&l);
            std::vector<std::size_t> pick(rule.premises.size(), 0);
            while (true) {
                std::map<std::string, std::string> binding;
                bool ok = true;
                auto unify = [&](const std::string& term, const std::string& value) {
                    if (!term.empty() && term[0] == '?') {
                        auto [it, fresh] = binding.emplace(term, value);
                        return fresh || it->second == value;
                    }
                    return term == value;
                };
                for (std::size_t i = 0; ok && i < rule.premises.size(); ++i) {
                    const LinkPattern& prem = rule.premises[i];
                    const LinkPattern& cand = *pool[pick[i]];
                    ok = unify(prem.source, cand.source) && unify(prem.label, cand.label) &&
                         unify(prem.object, cand.object) && unify(prem.target, cand.target);
                }
                if (ok) {
                    auto subst = [&](const std::string& term) {
                        if (!term.empty() && term[0] == '?' && binding.count(term))
                            return binding.at(term);
                        return term;
                    };
                    LinkPattern out{subst(rule.conclusion.source), subst(rule.conclusion.label),
                                    subst(rule.conclusion.object), subst(rule.conclusion.target)};
                    if (links.insert(out).second) grew = true;
                }
                // Advance the odometer over premise assignments.
                std::size_t d = 0;
                for (; d < pick.size(); ++d) {
                    if (++pick[d] < pool.size()) break;
                    pick[d] = 0;
                }
                if (pick.empty() || d == pick.size()) break;
            }
        }
    }
    return links;
}

} // namespace

TEST_CASE("implication closure matches a naive fixed point") {
    // follows(x,y) and follows(y,z) imply reaches(x,z).
    SchemaRule chain = SchemaRule::implication(
        {{"?x", "follows", "?d", "?y"}, {"?y", "follows", "?d", "?z"}},
        {"?x", "reaches", "?d", "?z"});

    std::set<LinkPattern> links = {
        {"a", "follows", "d", "b"},
        {"b", "follows", "d", "c"},
        {"c", "follows", "d", "a"},
    };
    const auto expect = naive_closure(links, {chain});
    CHECK(derive_implied_links(links, {chain}) == expect);
    CHECK(expect.count({"a", "reaches", "d", "c"}) == 1);
    CHECK(expect.count({"c", "reaches", "d", "b"}) == 1);
}

TEST_CASE("implications chain until fixed point") {
    SchemaRule lift = SchemaRule::implication({{"?x", "follows", "?d", "?y"}},
                                              {"?x", "reaches", "?d", "?y"});
    SchemaRule extend = SchemaRule::implication(
        {{"?x", "reaches", "?d", "?y"}, {"?y", "follows", "?d", "?z"}},
        {"?x", "reaches", "?d", "?z"});

    std::set<LinkPattern> links = {
        {"a", "follows", "d", "b"},
        {"b", "follows", "d", "c"},
        {"c", "follows", "d", "e"},
    };
    const auto closed = derive_implied_links(links, {lift, extend});
    CHECK(closed == naive_closure(links, {lift, extend}));
    CHECK(closed.count({"a", "reaches", "d", "e"}) == 1);
}
