#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sln/ledger.hpp"

namespace sln {

struct ConfirmationParams {
    double stake = 2.0;               // amount locked per request/argument
    double fee = 0.5;                 // charge per borrow and per argument, and the confirm reward
    double initial_trustiness = 10.0; // starting balance of every trustiness account
    double halt_threshold = 0.0;      // publishing halts below this reliability
};

enum class ConfirmPhase { Requested, Confirmed, Disputed, Arguing, Resolved, Exhausted };

const char* confirm_phase_name(ConfirmPhase phase) noexcept;

struct ConfirmationSession {
    std::string link_id;
    std::string requester;        // u: asked for confirmation, staked first
    std::string confirmee;        // v: confirms or disputes
    double stake = 0;
    double fee = 0;
    ConfirmPhase phase = ConfirmPhase::Requested;
    std::string next_responder;   // whose move it is while Disputed/Arguing
    std::size_t argument_count = 0;
    std::size_t transcript_length = 0;

    // Completed argument round-trips after the dispute.
    std::size_t rounds() const { return argument_count / 2; }
    bool terminal() const {
        return phase == ConfirmPhase::Confirmed || phase == ConfirmPhase::Resolved ||
               phase == ConfirmPhase::Exhausted;
    }
};

/**
 * Penalty-reward confirmation between the two parties of a link.
 *
 * Every node owns two score accounts on the ledger, "<node>#s" (trustiness,
 * starts at the configured initial balance) and "<node>#r" (responsibility,
 * starts at zero). All protocol steps are ledger transactions of kind SCORE
 * on the object "conf#<link>", so constructing an engine over an existing
 * ledger replays them and restores every balance and session exactly.
 *
 * Flow: request stakes s_u -> s_v and waits. confirm returns the stake and
 * mints the reward for both. dispute borrows the stake into r_v (fee
 * charged) and sends an argument r_v -> r_u (fee charged); the parties then
 * alternate argue steps (stake bounces r -> r, each costing the sender the
 * fee) until the turn holder either resolves (stake returns through the
 * counterpart's trustiness account, no fees) or can no longer fund an
 * argument, at which point the session is exhausted.
 */
class ConfirmationEngine {
public:
    explicit ConfirmationEngine(Ledger& ledger, ConfirmationParams params = {});

    ConfirmationSession request_confirmation(const std::string& link_id,
                                             const std::string& requester,
                                             const std::string& confirmee);
    ConfirmationSession confirm(const std::string& link_id);
    ConfirmationSession dispute(const std::string& link_id);
    ConfirmationSession argue(const std::string& link_id, const std::string& node);
    ConfirmationSession resolve(const std::string& link_id, const std::string& node);
    ConfirmationSession exhaust(const std::string& link_id);

    // True while the session's turn holder still has the stake and the fee.
    bool can_argue(const std::string& link_id) const;

    bool has_session(const std::string& link_id) const;
    ConfirmationSession session(const std::string& link_id) const;
    std::vector<std::string> session_ids() const;
    std::vector<BlockchainTransaction> transcript(const std::string& link_id) const;

    double trustiness(const std::string& node) const;
    double responsibility(const std::string& node) const;
    double reliability(const std::string& node) const;   // trustiness - responsibility
    bool halted(const std::string& node) const;

    // Conservation bookkeeping: sum of all score balances equals
    // initial_issued + minted - fees_charged at all times.
    double total_score() const;
    double initial_issued() const { return initial_issued_; }
    double minted() const { return minted_; }
    double fees_charged() const { return fees_; }

    const ConfirmationParams& params() const { return params_; }

    // Reliability lookup in the shape the publishing gate consumes. The
    // engine must outlive the returned function.
    std::function<double(const std::string&)> reliability_provider();

private:
    void ensure_node(const std::string& node);
    ConfirmationSession& need_session(const std::string& link_id);
    const ConfirmationSession& need_session(const std::string& link_id) const;
    BlockchainTransaction post(const std::string& payer, const std::string& payee,
                               const std::string& link_id, const std::string& op, double amount,
                               std::map<std::string, std::string> extra);
    void apply(const BlockchainTransaction& tx);
    bool can_argue_session(const ConfirmationSession& s) const;
    double balance(const std::string& score_account) const;

    Ledger& ledger_;
    ConfirmationParams params_;
    std::map<std::string, double> balance_;           // by score account ("u#s", "u#r")
    std::set<std::string> known_nodes_;
    std::map<std::string, ConfirmationSession> sessions_;
    double initial_issued_ = 0;
    double minted_ = 0;
    double fees_ = 0;
};

} // namespace sln
