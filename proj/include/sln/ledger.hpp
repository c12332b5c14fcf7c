#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "sln/hash.hpp"
#include "sln/object_id.hpp"
#include "sln/payload.hpp"

namespace sln {

/**
 * A registered account. Key material is simulated: the private key is
 * derived deterministically from the ledger's key seed and the account ID,
 * and public_key = SHA-256(private_key). The ledger acts as the single
 * local keystore for every account it creates.
 */
struct Account {
    std::string id;
    Bytes public_key;
    Bytes private_key;
};

/**
 * One append-only ledger entry. `prev_hash` points at the transaction that
 * handed `asset` (or its base object) to this transaction's payer; the
 * all-zero root marker starts a fresh object chain. `this_hash` covers
 * (prev_hash, payer, payee, asset, tag, payee public key) in the canonical
 * wire encoding, and `signature` is a keyed hash over `this_hash` that
 * verifies against the payer's public key.
 */
struct BlockchainTransaction {
    Digest prev_hash{};
    std::string payer;
    std::string payee;
    ObjectId asset;
    TagPayload tag;
    Digest this_hash{};
    Bytes signature;

    bool is_root() const { return prev_hash == Digest{}; }
};

// All transactions sharing one base object ID, in append order. The first
// entry is the object's root issue.
struct ChainList {
    std::string root;
    std::string object;
    std::vector<BlockchainTransaction> transactions;
};

struct TransactionCheck {
    bool hash_ok = false;
    bool signature_ok = false;
    bool link_ok = false;

    bool ok() const { return hash_ok && signature_ok && link_ok; }
};

struct VerificationReport {
    std::vector<TransactionCheck> checks;
    bool valid = false;
};

// Signing primitives, exposed so tests can forge and re-check records.
Digest transaction_digest(const BlockchainTransaction& tx, const Bytes& payee_public_key);
// Same digest with the asset already rendered; `rendered_asset` must equal
// tx.asset.str(). Lets batch paths render each asset once.
Digest transaction_digest(const BlockchainTransaction& tx, const Bytes& payee_public_key,
                          const std::string& rendered_asset);
Bytes sign_digest(const Bytes& private_key, const Digest& digest);
bool verify_signature(const Bytes& public_key, const Digest& digest, const Bytes& signature);
Bytes derive_public_key(const Bytes& private_key);

/**
 * Append-only transaction ledger with per-object hash chains.
 *
 * Transfer transactions (LINK, BOOTSTRAP) move an asset: the payer must hold
 * the exact asset, or hold its parent when extending the suffix by one hop,
 * and re-spending an asset that already moved on is rejected (DoubleSpend
 * when aimed at a different payee). Annotation transactions (RULE, SHORTCUT,
 * SCORE) never move assets; they chain to the payer's latest received
 * transaction of the same base object.
 *
 * When constructed with a path the ledger appends every record to that file
 * (magic "SLNC1", then u32-length-prefixed records) and reloads it on open.
 * Appends are serialized through a single writer lock; readers may run
 * concurrently and always observe a consistent prefix.
 */
class Ledger {
public:
    Ledger();
    explicit Ledger(const std::filesystem::path& path);

    Ledger(const Ledger&) = delete;
    Ledger& operator=(const Ledger&) = delete;

    // Must be called before the first create_account to take effect for it.
    void set_key_seed(std::uint64_t seed);

    Account create_account(const std::string& id);
    // Returns the existing account or creates it; never throws DuplicateAccount.
    Account ensure_account(const std::string& id);
    Account locate_account(const std::string& id) const;
    bool has_account(const std::string& id) const;
    std::size_t account_count() const;
    // Account IDs in creation order; the first entry is the oldest.
    std::vector<std::string> account_ids() const;

    BlockchainTransaction publish_transaction(const std::string& payer, const std::string& payee,
                                              const ObjectId& asset, TagPayload tag);

    std::vector<ChainList> locate_chain(const std::string& root) const;
    std::vector<BlockchainTransaction> locate_transactions(const std::string& payer,
                                                           const std::string& payee,
                                                           const std::string& base_object) const;
    VerificationReport verify_chain(const ChainList& chain) const;

    // Focused queries used by the publishing/tracing layers.
    std::vector<BlockchainTransaction> transactions_for_object(const std::string& base) const;
    std::vector<BlockchainTransaction> transactions_from(const std::string& payer,
                                                         const std::string& base) const;
    std::vector<BlockchainTransaction> received_by(const std::string& payee,
                                                   const std::string& base) const;
    std::vector<BlockchainTransaction> link_transactions(const std::string& base,
                                                         const std::string& link_id) const;
    std::optional<BlockchainTransaction> first_issue(std::string_view base) const;

    // Borrowing variants of the queries above. Records are append-only and
    // never relocated, so the returned pointers stay valid for the ledger's
    // lifetime and the pointed-to records never change; only the lookup
    // itself synchronizes with writers. Prefer these in tight loops where
    // copying whole transactions (asset paths grow with chain length) shows
    // up in profiles.
    std::vector<const BlockchainTransaction*> transactions_from_refs(const std::string& payer,
                                                                     const std::string& base) const;
    std::vector<const BlockchainTransaction*> received_by_refs(const std::string& payee,
                                                               const std::string& base) const;
    const BlockchainTransaction* latest_link_transaction(const std::string& base,
                                                         const std::string& link_id) const;
    std::vector<std::string> objects_issued_by(const std::string& root) const;
    std::vector<std::string> all_objects() const;
    bool has_transaction(std::string_view payer, std::string_view payee, std::string_view base,
                         TxKind kind) const;

    std::size_t size() const;
    BlockchainTransaction transaction_at(std::size_t index) const;
    std::vector<BlockchainTransaction> all_transactions() const;

    Digest recompute_digest(const BlockchainTransaction& tx) const;

    // Serializes the complete log (the same bytes a persistent ledger holds
    // on disk), independent of whether this instance is file-backed.
    void write_log(std::ostream& out) const;

    static Digest root_marker() { return Digest{}; }
    static constexpr char magic[6] = "SLNC1";

private:
    struct TransferDecision {
        Digest prev{};
    };

    Account create_account_locked(const std::string& id, bool persist);
    const Account* find_account_locked(const std::string& id) const;
    Digest resolve_transfer_prev_locked(const std::string& payer, const std::string& payee,
                                        const ObjectId& asset, const std::string& rendered) const;
    Digest resolve_annotation_prev_locked(const std::string& payer, const ObjectId& asset) const;
    void index_transaction_locked(std::size_t idx);
    void append_record_locked(const Bytes& record);
    void load_from_file_locked(const std::filesystem::path& path);
    static Bytes encode_account_record(const Account& account);
    static Bytes encode_transaction_record(const BlockchainTransaction& tx);

    mutable std::shared_mutex mu_;
    std::uint64_t key_seed_ = 0;
    std::uint64_t clock_ = 0;

    std::unordered_map<std::string, Account> accounts_;
    std::vector<std::string> account_order_;
    std::deque<BlockchainTransaction> txs_;

    std::vector<std::pair<char, std::uint32_t>> events_;   // replay order: 'A' accounts, 'T' txs

    // Transparent hashing lets lookups probe with string_view slices (an
    // asset's base, or a parent prefix of its rendering) without building a
    // std::string key first.
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    using IndexMap =
        std::unordered_map<std::string, std::vector<std::uint32_t>, StringHash, std::equal_to<>>;

    IndexMap by_base_;
    // Keyed by views into the stored records' asset renderings; the record
    // deque never relocates, so the views stay valid for the ledger's life.
    std::unordered_map<std::string_view, std::vector<std::uint32_t>> by_exact_transfer_;
    IndexMap received_;
    IndexMap sent_;
    IndexMap pair_;
    IndexMap by_link_;
    std::vector<std::string> base_order_;

    std::filesystem::path path_;
    std::ofstream file_;
    bool persistent_ = false;
};

} // namespace sln
