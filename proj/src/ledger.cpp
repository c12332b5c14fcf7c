#include "sln/ledger.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <iterator>
#include <utility>

#include "sln/errors.hpp"
#include "sln/wire.hpp"

namespace sln {
namespace {

// Length-prefixed join so composite index keys can never collide, whatever
// characters the identifiers contain.
std::string join_key(std::initializer_list<std::string_view> parts) {
    std::string out;
    for (auto part : parts) {
        out += std::to_string(part.size());
        out += ':';
        out.append(part.data(), part.size());
    }
    return out;
}

bool is_transfer(TxKind kind) { return kind == TxKind::Link || kind == TxKind::Bootstrap; }

} // namespace

Digest transaction_digest(const BlockchainTransaction& tx, const Bytes& payee_public_key) {
    return transaction_digest(tx, payee_public_key, tx.asset.str());
}

Digest transaction_digest(const BlockchainTransaction& tx, const Bytes& payee_public_key,
                          const std::string& rendered_asset) {
    ByteWriter w;
    w.put_raw(tx.prev_hash);
    w.put_str(tx.payer);
    w.put_str(tx.payee);
    w.put_str(rendered_asset);
    w.put_str(tx.tag.canonical_text());
    w.put_blob(payee_public_key);
    return sha256(w.bytes());
}

Bytes derive_public_key(const Bytes& private_key) {
    Digest d = sha256(private_key);
    return Bytes(d.begin(), d.end());
}

Bytes sign_digest(const Bytes& private_key, const Digest& digest) {
    return to_bytes(hmac_sha256(derive_public_key(private_key), digest));
}

bool verify_signature(const Bytes& public_key, const Digest& digest, const Bytes& signature) {
    return to_bytes(hmac_sha256(public_key, digest)) == signature;
}

Ledger::Ledger() = default;

Ledger::Ledger(const std::filesystem::path& path) : path_(path), persistent_(true) {
    std::unique_lock lock(mu_);
    if (std::filesystem::exists(path_)) {
        load_from_file_locked(path_);
        file_.open(path_, std::ios::binary | std::ios::app);
    } else {
        file_.open(path_, std::ios::binary | std::ios::out);
        if (file_) {
            file_.write(magic, 5);
            file_.flush();
        }
    }
    if (!file_) fail(errc::io_error, "cannot open ledger file " + path_.string());
}

void Ledger::set_key_seed(std::uint64_t seed) {
    std::unique_lock lock(mu_);
    key_seed_ = seed;
}

Account Ledger::create_account_locked(const std::string& id, bool persist) {
    check_identifier(id, "account");
    if (accounts_.count(id)) fail(errc::duplicate_account, "account already exists: " + id);
    ByteWriter w;
    w.put_u64(key_seed_);
    w.put_str(id);
    Digest priv = sha256(w.bytes());
    Account account;
    account.id = id;
    account.private_key.assign(priv.begin(), priv.end());
    account.public_key = derive_public_key(account.private_key);
    if (persist && persistent_) append_record_locked(encode_account_record(account));
    accounts_.emplace(id, account);
    events_.emplace_back('A', static_cast<std::uint32_t>(account_order_.size()));
    account_order_.push_back(id);
    return account;
}

Account Ledger::create_account(const std::string& id) {
    std::unique_lock lock(mu_);
    return create_account_locked(id, true);
}

Account Ledger::ensure_account(const std::string& id) {
    std::unique_lock lock(mu_);
    if (const Account* existing = find_account_locked(id)) return *existing;
    return create_account_locked(id, true);
}

const Account* Ledger::find_account_locked(const std::string& id) const {
    auto it = accounts_.find(id);
    return it == accounts_.end() ? nullptr : &it->second;
}

Account Ledger::locate_account(const std::string& id) const {
    std::shared_lock lock(mu_);
    const Account* account = find_account_locked(id);
    if (!account) fail(errc::account_not_found, "no such account: " + id);
    return *account;
}

bool Ledger::has_account(const std::string& id) const {
    std::shared_lock lock(mu_);
    return accounts_.count(id) != 0;
}

std::size_t Ledger::account_count() const {
    std::shared_lock lock(mu_);
    return accounts_.size();
}

std::vector<std::string> Ledger::account_ids() const {
    std::shared_lock lock(mu_);
    return account_order_;
}

Digest Ledger::resolve_transfer_prev_locked(const std::string& payer, const std::string& payee,
                                            const ObjectId& asset,
                                            const std::string& rendered) const {
    auto it = by_exact_transfer_.find(std::string_view(rendered));
    if (it != by_exact_transfer_.end() && !it->second.empty()) {
        const BlockchainTransaction& last = txs_[it->second.back()];
        if (last.payee == payer) return last.this_hash;
        for (auto ri = it->second.rbegin(); ri != it->second.rend(); ++ri) {
            const BlockchainTransaction& candidate = txs_[*ri];
            if (candidate.payer != payer || candidate.payee == payer) continue;
            if (candidate.payee != payee)
                fail(errc::double_spend,
                     payer + " already transferred " + rendered + " to " + candidate.payee);
            fail(errc::not_asset_owner,
                 payer + " already transferred " + rendered + " to " + payee);
        }
        fail(errc::not_asset_owner, payer + " does not hold " + rendered);
    }
    if (!asset.path_empty()) {
        // The parent's rendered form is everything before the last separator.
        const std::string_view parent =
            std::string_view(rendered).substr(0, rendered.rfind('.'));
        auto pit = by_exact_transfer_.find(parent);
        if (pit == by_exact_transfer_.end() || pit->second.empty())
            fail(errc::not_asset_owner,
                 "cannot extend unrecorded asset " + std::string(parent));
        const BlockchainTransaction& last = txs_[pit->second.back()];
        if (last.payee != payer)
            fail(errc::not_asset_owner, payer + " does not hold " + std::string(parent));
        return last.this_hash;
    }
    auto bit = by_base_.find(asset.base());
    if (bit != by_base_.end() && !bit->second.empty())
        fail(errc::not_asset_owner, "object already issued: " + rendered);
    return root_marker();
}

Digest Ledger::resolve_annotation_prev_locked(const std::string& payer,
                                              const ObjectId& asset) const {
    auto it = received_.find(join_key({payer, asset.base()}));
    if (it != received_.end() && !it->second.empty()) return txs_[it->second.back()].this_hash;
    auto bit = by_base_.find(asset.base());
    if (bit != by_base_.end() && !bit->second.empty())
        fail(errc::not_asset_owner,
             payer + " has no transaction of object " + std::string(asset.base()));
    return root_marker();
}

BlockchainTransaction Ledger::publish_transaction(const std::string& payer,
                                                  const std::string& payee, const ObjectId& asset,
                                                  TagPayload tag) {
    std::unique_lock lock(mu_);
    const Account* payer_account = find_account_locked(payer);
    if (!payer_account) fail(errc::account_not_found, "no such account: " + payer);
    const Account* payee_account = find_account_locked(payee);
    if (!payee_account) fail(errc::account_not_found, "no such account: " + payee);
    const std::string& rendered = asset.str();
    if (rendered.empty()) fail(errc::bad_identifier, "object must not be empty");

    BlockchainTransaction tx;
    tx.prev_hash = is_transfer(tag.kind)
                       ? resolve_transfer_prev_locked(payer, payee, asset, rendered)
                       : resolve_annotation_prev_locked(payer, asset);
    tag.timestamp = clock_;
    tx.payer = payer;
    tx.payee = payee;
    tx.asset = asset;
    tx.tag = std::move(tag);
    tx.this_hash = transaction_digest(tx, payee_account->public_key, rendered);
    // Equivalent to sign_digest but uses the public key the account already
    // carries instead of re-deriving it from the private key per signature.
    tx.signature = to_bytes(hmac_sha256(payer_account->public_key, tx.this_hash));

    if (persistent_) append_record_locked(encode_transaction_record(tx));
    ++clock_;
    const auto idx = static_cast<std::uint32_t>(txs_.size());
    txs_.push_back(std::move(tx));
    events_.emplace_back('T', idx);
    index_transaction_locked(idx);
    return txs_.back();
}

void Ledger::index_transaction_locked(std::size_t idx) {
    const BlockchainTransaction& tx = txs_[idx];
    const auto i = static_cast<std::uint32_t>(idx);
    const std::string_view base = tx.asset.base();
    auto& base_list = by_base_[std::string(base)];
    if (base_list.empty()) base_order_.emplace_back(base);
    base_list.push_back(i);
    // The key views the stored record's own rendering, so no copy is made.
    if (is_transfer(tx.tag.kind)) by_exact_transfer_[std::string_view(tx.asset.str())].push_back(i);
    received_[join_key({tx.payee, base})].push_back(i);
    sent_[join_key({tx.payer, base})].push_back(i);
    pair_[join_key({tx.payer, tx.payee, base})].push_back(i);
    if (tx.tag.kind == TxKind::Link && !tx.tag.link_id.empty())
        by_link_[join_key({base, tx.tag.link_id})].push_back(i);
}

std::vector<ChainList> Ledger::locate_chain(const std::string& root) const {
    std::shared_lock lock(mu_);
    std::vector<ChainList> out;
    for (const auto& base : base_order_) {
        const auto& list = by_base_.at(base);
        if (list.empty() || txs_[list.front()].payer != root) continue;
        ChainList chain;
        chain.root = root;
        chain.object = base;
        chain.transactions.reserve(list.size());
        for (auto i : list) chain.transactions.push_back(txs_[i]);
        out.push_back(std::move(chain));
    }
    return out;
}

std::vector<BlockchainTransaction> Ledger::locate_transactions(
    const std::string& payer, const std::string& payee, const std::string& base_object) const {
    std::shared_lock lock(mu_);
    std::vector<BlockchainTransaction> out;
    auto it = pair_.find(join_key({payer, payee, base_object}));
    if (it == pair_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(txs_[i]);
    return out;
}

VerificationReport Ledger::verify_chain(const ChainList& chain) const {
    std::shared_lock lock(mu_);
    VerificationReport report;
    report.checks.resize(chain.transactions.size());
    // Recomputed digest of each earlier record -> whether its own hash and
    // chain position checked out; a corrupted record poisons every later
    // record that links through it.
    std::unordered_map<std::string, bool> digest_valid;
    for (std::size_t i = 0; i < chain.transactions.size(); ++i) {
        const BlockchainTransaction& tx = chain.transactions[i];
        TransactionCheck& check = report.checks[i];
        const Account* payer_account = find_account_locked(tx.payer);
        const Account* payee_account = find_account_locked(tx.payee);
        Digest recomputed{};
        if (payee_account) {
            recomputed = transaction_digest(tx, payee_account->public_key);
            check.hash_ok = recomputed == tx.this_hash;
        }
        check.signature_ok =
            payer_account && verify_signature(payer_account->public_key, tx.this_hash, tx.signature);
        if (tx.is_root()) {
            check.link_ok = i == 0;
        } else {
            auto it = digest_valid.find(to_hex(tx.prev_hash));
            check.link_ok = it != digest_valid.end() && it->second;
        }
        if (payee_account) digest_valid[to_hex(recomputed)] = check.hash_ok && check.link_ok;
    }
    report.valid = !report.checks.empty() &&
                   std::all_of(report.checks.begin(), report.checks.end(),
                               [](const TransactionCheck& c) { return c.ok(); });
    return report;
}

std::vector<BlockchainTransaction> Ledger::transactions_for_object(const std::string& base) const {
    std::shared_lock lock(mu_);
    std::vector<BlockchainTransaction> out;
    auto it = by_base_.find(base);
    if (it == by_base_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(txs_[i]);
    return out;
}

std::vector<BlockchainTransaction> Ledger::transactions_from(const std::string& payer,
                                                             const std::string& base) const {
    std::shared_lock lock(mu_);
    std::vector<BlockchainTransaction> out;
    auto it = sent_.find(join_key({payer, base}));
    if (it == sent_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(txs_[i]);
    return out;
}

std::vector<BlockchainTransaction> Ledger::received_by(const std::string& payee,
                                                       const std::string& base) const {
    std::shared_lock lock(mu_);
    std::vector<BlockchainTransaction> out;
    auto it = received_.find(join_key({payee, base}));
    if (it == received_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(txs_[i]);
    return out;
}

std::vector<BlockchainTransaction> Ledger::link_transactions(const std::string& base,
                                                             const std::string& link_id) const {
    std::shared_lock lock(mu_);
    std::vector<BlockchainTransaction> out;
    auto it = by_link_.find(join_key({base, link_id}));
    if (it == by_link_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(txs_[i]);
    return out;
}

std::vector<const BlockchainTransaction*> Ledger::transactions_from_refs(
    const std::string& payer, const std::string& base) const {
    std::shared_lock lock(mu_);
    std::vector<const BlockchainTransaction*> out;
    auto it = sent_.find(join_key({payer, base}));
    if (it == sent_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(&txs_[i]);
    return out;
}

std::vector<const BlockchainTransaction*> Ledger::received_by_refs(const std::string& payee,
                                                                   const std::string& base) const {
    std::shared_lock lock(mu_);
    std::vector<const BlockchainTransaction*> out;
    auto it = received_.find(join_key({payee, base}));
    if (it == received_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(&txs_[i]);
    return out;
}

const BlockchainTransaction* Ledger::latest_link_transaction(const std::string& base,
                                                             const std::string& link_id) const {
    std::shared_lock lock(mu_);
    auto it = by_link_.find(join_key({base, link_id}));
    if (it == by_link_.end() || it->second.empty()) return nullptr;
    return &txs_[it->second.back()];
}

std::optional<BlockchainTransaction> Ledger::first_issue(std::string_view base) const {
    std::shared_lock lock(mu_);
    auto it = by_base_.find(base);
    if (it == by_base_.end() || it->second.empty()) return std::nullopt;
    return txs_[it->second.front()];
}

std::vector<std::string> Ledger::objects_issued_by(const std::string& root) const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& base : base_order_) {
        const auto& list = by_base_.at(base);
        if (!list.empty() && txs_[list.front()].payer == root) out.push_back(base);
    }
    return out;
}

std::vector<std::string> Ledger::all_objects() const {
    std::shared_lock lock(mu_);
    return base_order_;
}

bool Ledger::has_transaction(std::string_view payer, std::string_view payee, std::string_view base,
                             TxKind kind) const {
    std::shared_lock lock(mu_);
    auto it = pair_.find(join_key({payer, payee, base}));
    if (it == pair_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](std::uint32_t i) { return txs_[i].tag.kind == kind; });
}

std::size_t Ledger::size() const {
    std::shared_lock lock(mu_);
    return txs_.size();
}

BlockchainTransaction Ledger::transaction_at(std::size_t index) const {
    std::shared_lock lock(mu_);
    if (index >= txs_.size()) fail(errc::object_not_found, "transaction index out of range");
    return txs_[index];
}

std::vector<BlockchainTransaction> Ledger::all_transactions() const {
    std::shared_lock lock(mu_);
    return std::vector<BlockchainTransaction>(txs_.begin(), txs_.end());
}

Digest Ledger::recompute_digest(const BlockchainTransaction& tx) const {
    std::shared_lock lock(mu_);
    const Account* payee_account = find_account_locked(tx.payee);
    if (!payee_account) fail(errc::account_not_found, "no such account: " + tx.payee);
    return transaction_digest(tx, payee_account->public_key);
}

Bytes Ledger::encode_account_record(const Account& account) {
    ByteWriter w;
    w.put_u8('A');
    w.put_str(account.id);
    w.put_blob(account.public_key);
    w.put_blob(account.private_key);
    return w.take();
}

Bytes Ledger::encode_transaction_record(const BlockchainTransaction& tx) {
    ByteWriter w;
    w.put_u8('T');
    w.put_raw(tx.prev_hash);
    w.put_str(tx.payer);
    w.put_str(tx.payee);
    w.put_str(tx.asset.str());
    w.put_str(tx.tag.canonical_text());
    w.put_raw(tx.this_hash);
    w.put_blob(tx.signature);
    return w.take();
}

void Ledger::append_record_locked(const Bytes& record) {
    ByteWriter w;
    w.put_blob(record);
    const Bytes& framed = w.bytes();
    file_.write(reinterpret_cast<const char*>(framed.data()),
                static_cast<std::streamsize>(framed.size()));
    file_.flush();
    if (!file_) fail(errc::io_error, "cannot append to ledger file " + path_.string());
}

void Ledger::write_log(std::ostream& out) const {
    std::shared_lock lock(mu_);
    out.write(magic, 5);
    for (const auto& [type, idx] : events_) {
        Bytes record = type == 'A'
                           ? encode_account_record(accounts_.at(account_order_[idx]))
                           : encode_transaction_record(txs_[idx]);
        ByteWriter w;
        w.put_blob(record);
        const Bytes& framed = w.bytes();
        out.write(reinterpret_cast<const char*>(framed.data()),
                  static_cast<std::streamsize>(framed.size()));
    }
    if (!out) fail(errc::io_error, "cannot write ledger log");
}

void Ledger::load_from_file_locked(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot read ledger file " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 5 || std::memcmp(data.data(), magic, 5) != 0)
        fail(errc::parse_error, "not a ledger log: " + path.string());
    ByteReader reader(std::span<const std::uint8_t>(data).subspan(5));
    while (!reader.done()) {
        Bytes record = reader.get_blob();
        ByteReader r(record);
        const std::uint8_t type = r.get_u8();
        if (type == 'A') {
            Account account;
            account.id = r.get_str();
            account.public_key = r.get_blob();
            account.private_key = r.get_blob();
            if (!r.done()) fail(errc::parse_error, "trailing bytes in account record");
            if (accounts_.count(account.id))
                fail(errc::parse_error, "duplicate account in log: " + account.id);
            accounts_.emplace(account.id, account);
            events_.emplace_back('A', static_cast<std::uint32_t>(account_order_.size()));
            account_order_.push_back(account.id);
        } else if (type == 'T') {
            BlockchainTransaction tx;
            tx.prev_hash = r.get_digest();
            tx.payer = r.get_str();
            tx.payee = r.get_str();
            tx.asset = ObjectId::parse(r.get_str());
            tx.tag = TagPayload::parse(r.get_str());
            tx.this_hash = r.get_digest();
            tx.signature = r.get_blob();
            if (!r.done()) fail(errc::parse_error, "trailing bytes in transaction record");
            clock_ = std::max(clock_, tx.tag.timestamp + 1);
            const auto idx = static_cast<std::uint32_t>(txs_.size());
            txs_.push_back(std::move(tx));
            events_.emplace_back('T', idx);
            index_transaction_locked(idx);
        } else {
            fail(errc::parse_error, "unknown record type in ledger log");
        }
    }
}

} // namespace sln
