#include "sln/confirmation.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "sln/errors.hpp"

namespace sln {
namespace {

constexpr const char* kBasePrefix = "conf#";

std::string format_amount(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_amount(const std::string& text) { return std::strtod(text.c_str(), nullptr); }

std::string score_account(const std::string& node, char kind) {
    return node + "#" + kind;
}

// "u#s" -> "u". Score accounts are always built by score_account, so the
// suffix is exactly two characters.
std::string node_of(const std::string& score_acct) {
    return score_acct.substr(0, score_acct.size() - 2);
}

std::string conf_base(const std::string& link_id) { return kBasePrefix + link_id; }

bool is_conf_base(const std::string& base) {
    return base.rfind(kBasePrefix, 0) == 0;
}

} // namespace

const char* confirm_phase_name(ConfirmPhase phase) noexcept {
    switch (phase) {
    case ConfirmPhase::Requested: return "Requested";
    case ConfirmPhase::Confirmed: return "Confirmed";
    case ConfirmPhase::Disputed: return "Disputed";
    case ConfirmPhase::Arguing: return "Arguing";
    case ConfirmPhase::Resolved: return "Resolved";
    case ConfirmPhase::Exhausted: return "Exhausted";
    }
    return "?";
}

ConfirmationEngine::ConfirmationEngine(Ledger& ledger, ConfirmationParams params)
    : ledger_(ledger), params_(params) {
    // Rebuild balances and sessions from the score chains already on the
    // ledger. Timestamps are a strictly increasing logical clock, so sorting
    // by them restores the exact original order across sessions.
    std::vector<BlockchainTransaction> replay;
    for (const auto& base : ledger_.all_objects()) {
        if (!is_conf_base(base)) continue;
        for (const auto& tx : ledger_.transactions_for_object(base)) {
            if (tx.tag.kind == TxKind::Score) replay.push_back(tx);
        }
    }
    std::sort(replay.begin(), replay.end(),
              [](const BlockchainTransaction& a, const BlockchainTransaction& b) {
                  return a.tag.timestamp < b.tag.timestamp;
              });
    for (const auto& tx : replay) apply(tx);
}

void ConfirmationEngine::ensure_node(const std::string& node) {
    if (!known_nodes_.insert(node).second) return;
    const std::string s = score_account(node, 's');
    const std::string r = score_account(node, 'r');
    ledger_.ensure_account(s);
    ledger_.ensure_account(r);
    balance_[s] = params_.initial_trustiness;
    balance_[r] = 0;
    initial_issued_ += params_.initial_trustiness;
}

double ConfirmationEngine::balance(const std::string& score_acct) const {
    const auto it = balance_.find(score_acct);
    return it == balance_.end() ? 0.0 : it->second;
}

double ConfirmationEngine::trustiness(const std::string& node) const {
    if (!known_nodes_.count(node)) return params_.initial_trustiness;
    return balance(score_account(node, 's'));
}

double ConfirmationEngine::responsibility(const std::string& node) const {
    return balance(score_account(node, 'r'));
}

double ConfirmationEngine::reliability(const std::string& node) const {
    return trustiness(node) - responsibility(node);
}

bool ConfirmationEngine::halted(const std::string& node) const {
    return reliability(node) < params_.halt_threshold;
}

double ConfirmationEngine::total_score() const {
    double total = 0;
    for (const auto& [acct, value] : balance_) {
        (void)acct;
        total += value;
    }
    return total;
}

std::function<double(const std::string&)> ConfirmationEngine::reliability_provider() {
    return [this](const std::string& node) { return reliability(node); };
}

bool ConfirmationEngine::has_session(const std::string& link_id) const {
    return sessions_.count(link_id) != 0;
}

ConfirmationSession& ConfirmationEngine::need_session(const std::string& link_id) {
    const auto it = sessions_.find(link_id);
    if (it == sessions_.end()) fail(errc::session_not_found, "no confirmation session for link " + link_id);
    return it->second;
}

const ConfirmationSession& ConfirmationEngine::need_session(const std::string& link_id) const {
    const auto it = sessions_.find(link_id);
    if (it == sessions_.end()) fail(errc::session_not_found, "no confirmation session for link " + link_id);
    return it->second;
}

ConfirmationSession ConfirmationEngine::session(const std::string& link_id) const {
    return need_session(link_id);
}

std::vector<std::string> ConfirmationEngine::session_ids() const {
    std::vector<std::string> ids;
    ids.reserve(sessions_.size());
    for (const auto& [id, s] : sessions_) {
        (void)s;
        ids.push_back(id);
    }
    return ids;
}

std::vector<BlockchainTransaction> ConfirmationEngine::transcript(const std::string& link_id) const {
    need_session(link_id);
    return ledger_.transactions_for_object(conf_base(link_id));
}

BlockchainTransaction ConfirmationEngine::post(const std::string& payer, const std::string& payee,
                                               const std::string& link_id, const std::string& op,
                                               double amount,
                                               std::map<std::string, std::string> extra) {
    TagPayload tag;
    tag.kind = TxKind::Score;
    tag.link_id = link_id;
    tag.attributes = std::move(extra);
    tag.attributes["op"] = op;
    tag.attributes["amount"] = format_amount(amount);
    const auto tx = ledger_.publish_transaction(payer, payee, ObjectId(conf_base(link_id)), tag);
    apply(tx);
    return tx;
}

// Single source of truth for score movement and session bookkeeping: the
// live operations and the replay constructor both go through here, so a
// reloaded engine cannot disagree with the one that wrote the chain.
void ConfirmationEngine::apply(const BlockchainTransaction& tx) {
    const std::string link_id(tx.asset.base().substr(std::string_view(kBasePrefix).size()));
    const auto& attrs = tx.tag.attributes;
    const std::string op = attrs.count("op") ? attrs.at("op") : "";
    const double amount = attrs.count("amount") ? parse_amount(attrs.at("amount")) : 0.0;

    ensure_node(node_of(tx.payer));
    ensure_node(node_of(tx.payee));

    balance_[tx.payer] -= amount;
    balance_[tx.payee] += amount;
    if (attrs.count("fee")) {
        const double fee = parse_amount(attrs.at("fee"));
        balance_[score_account(node_of(tx.payer), 's')] -= fee;
        fees_ += fee;
    }
    if (attrs.count("reward")) {
        const double reward = parse_amount(attrs.at("reward"));
        balance_[tx.payer] += reward;
        balance_[tx.payee] += reward;
        minted_ += 2 * reward;
    }

    if (op == "request") {
        ConfirmationSession s;
        s.link_id = link_id;
        s.requester = node_of(tx.payer);
        s.confirmee = node_of(tx.payee);
        s.stake = amount;
        s.fee = attrs.count("fee_rate") ? parse_amount(attrs.at("fee_rate")) : params_.fee;
        s.phase = ConfirmPhase::Requested;
        sessions_[link_id] = s;
    }
    auto& s = sessions_.at(link_id);
    s.transcript_length += 1;
    if (op == "confirm") {
        s.phase = ConfirmPhase::Confirmed;
    } else if (op == "argument") {
        s.phase = ConfirmPhase::Disputed;
        s.next_responder = node_of(tx.payee);
    } else if (op == "argue") {
        s.phase = ConfirmPhase::Arguing;
        s.argument_count += 1;
        s.next_responder = node_of(tx.payee);
    } else if (op == "trustiness-return") {
        s.phase = ConfirmPhase::Resolved;
        s.next_responder.clear();
    } else if (op == "exhaust") {
        s.phase = ConfirmPhase::Exhausted;
        s.next_responder.clear();
    }
    // "borrow" and "confirm-response" are the first halves of two-step
    // operations; the second half sets the phase.
}

ConfirmationSession ConfirmationEngine::request_confirmation(const std::string& link_id,
                                                             const std::string& requester,
                                                             const std::string& confirmee) {
    if (link_id.empty()) fail(errc::invalid_argument, "link id must not be empty");
    if (requester == confirmee)
        fail(errc::invalid_argument, "a node cannot request confirmation from itself");
    if (sessions_.count(link_id))
        fail(errc::duplicate_request, "confirmation for link " + link_id + " already requested");
    ensure_node(requester);
    ensure_node(confirmee);
    if (trustiness(requester) < params_.stake)
        fail(errc::insufficient_trustiness,
             requester + " cannot stake " + format_amount(params_.stake));
    post(score_account(requester, 's'), score_account(confirmee, 's'), link_id, "request",
         params_.stake,
         {{"requester", requester},
          {"confirmee", confirmee},
          {"fee_rate", format_amount(params_.fee)}});
    return sessions_.at(link_id);
}

ConfirmationSession ConfirmationEngine::confirm(const std::string& link_id) {
    auto& s = need_session(link_id);
    if (s.phase != ConfirmPhase::Requested)
        fail(errc::wrong_phase, "link " + link_id + " is " + confirm_phase_name(s.phase));
    if (trustiness(s.confirmee) < s.stake)
        fail(errc::insufficient_trustiness,
             s.confirmee + " cannot return the stake of " + format_amount(s.stake));
    post(score_account(s.confirmee, 's'), score_account(s.requester, 's'), link_id, "confirm",
         s.stake, {{"reward", format_amount(s.fee)}});
    return s;
}

ConfirmationSession ConfirmationEngine::dispute(const std::string& link_id) {
    auto& s = need_session(link_id);
    if (s.phase != ConfirmPhase::Requested)
        fail(errc::wrong_phase, "link " + link_id + " is " + confirm_phase_name(s.phase));
    // The dispute posts two fee-bearing transactions, so the full cost is
    // the stake plus two fees; requiring it up front keeps trustiness
    // non-negative through the pair.
    if (trustiness(s.confirmee) < s.stake + 2 * s.fee)
        fail(errc::insufficient_trustiness,
             s.confirmee + " cannot fund a dispute of " + format_amount(s.stake + 2 * s.fee));
    post(score_account(s.confirmee, 's'), score_account(s.confirmee, 'r'), link_id, "borrow",
         s.stake, {{"fee", format_amount(s.fee)}});
    post(score_account(s.confirmee, 'r'), score_account(s.requester, 'r'), link_id, "argument",
         s.stake, {{"fee", format_amount(s.fee)}});
    return s;
}

bool ConfirmationEngine::can_argue_session(const ConfirmationSession& s) const {
    if (s.phase != ConfirmPhase::Disputed && s.phase != ConfirmPhase::Arguing) return false;
    return responsibility(s.next_responder) >= s.stake && trustiness(s.next_responder) >= s.fee;
}

bool ConfirmationEngine::can_argue(const std::string& link_id) const {
    return can_argue_session(need_session(link_id));
}

ConfirmationSession ConfirmationEngine::argue(const std::string& link_id, const std::string& node) {
    auto& s = need_session(link_id);
    if (s.phase != ConfirmPhase::Disputed && s.phase != ConfirmPhase::Arguing)
        fail(errc::wrong_phase, "link " + link_id + " is " + confirm_phase_name(s.phase));
    if (node != s.next_responder)
        fail(errc::wrong_phase, "it is " + s.next_responder + "'s turn on link " + link_id);
    if (responsibility(node) < s.stake)
        fail(errc::insufficient_responsibility,
             node + " does not hold the stake of " + format_amount(s.stake));
    if (trustiness(node) < s.fee)
        fail(errc::insufficient_trustiness,
             node + " cannot pay the argument fee of " + format_amount(s.fee));
    const std::string other = node == s.requester ? s.confirmee : s.requester;
    post(score_account(node, 'r'), score_account(other, 'r'), link_id, "argue", s.stake,
         {{"fee", format_amount(s.fee)}});
    return s;
}

ConfirmationSession ConfirmationEngine::resolve(const std::string& link_id, const std::string& node) {
    auto& s = need_session(link_id);
    if (s.phase != ConfirmPhase::Disputed && s.phase != ConfirmPhase::Arguing)
        fail(errc::wrong_phase, "link " + link_id + " is " + confirm_phase_name(s.phase));
    if (node != s.next_responder)
        fail(errc::wrong_phase, "it is " + s.next_responder + "'s turn on link " + link_id);
    if (responsibility(node) < s.stake)
        fail(errc::insufficient_responsibility,
             node + " does not hold the stake of " + format_amount(s.stake));
    const std::string other = node == s.requester ? s.confirmee : s.requester;
    // Give the stake back through the counterpart's trustiness account: it
    // lands there and immediately returns to the resolver's own trustiness,
    // clearing both responsibility balances without any fee.
    post(score_account(node, 'r'), score_account(other, 's'), link_id, "confirm-response", s.stake,
         {});
    post(score_account(other, 's'), score_account(node, 's'), link_id, "trustiness-return", s.stake,
         {});
    return s;
}

ConfirmationSession ConfirmationEngine::exhaust(const std::string& link_id) {
    auto& s = need_session(link_id);
    if (s.phase != ConfirmPhase::Disputed && s.phase != ConfirmPhase::Arguing)
        fail(errc::wrong_phase, "link " + link_id + " is " + confirm_phase_name(s.phase));
    if (can_argue_session(s))
        fail(errc::wrong_phase, s.next_responder + " can still respond on link " + link_id);
    // Zero-amount marker from the stranded turn holder; its responsibility
    // account received the last argument, so the annotation chains onto it.
    const std::string holder = score_account(s.next_responder, 'r');
    post(holder, holder, link_id, "exhaust", 0.0, {});
    return s;
}

} // namespace sln
