#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include "sln/errors.hpp"
#include "sln/ledger.hpp"
#include "sln/rng.hpp"

using namespace sln;

namespace {

TagPayload transfer_tag(TxKind kind, const std::string& link_id = "") {
    TagPayload tag;
    tag.kind = kind;
    tag.link_id = link_id;
    return tag;
}

// d issued T->v1, then passed v1->v2->v3 with suffix growth.
struct ChainFixture {
    Ledger ledger;

    ChainFixture() {
        for (const char* id : {"T", "v1", "v2", "v3", "v4"}) ledger.create_account(id);
        ledger.publish_transaction("T", "v1", ObjectId("d"), transfer_tag(TxKind::Bootstrap));
        ledger.publish_transaction("v1", "v2", ObjectId("d", {"v2"}), transfer_tag(TxKind::Link));
        ledger.publish_transaction("v2", "v3", ObjectId("d", {"v2", "v3"}),
                                   transfer_tag(TxKind::Link));
    }
};

} // namespace

TEST_CASE("account keys are deterministic in the seed") {
    Ledger a, b, c;
    a.set_key_seed(11);
    b.set_key_seed(11);
    c.set_key_seed(12);
    const Account ka = a.create_account("alice");
    const Account kb = b.create_account("alice");
    const Account kc = c.create_account("alice");
    CHECK(ka.private_key == kb.private_key);
    CHECK(ka.public_key == kb.public_key);
    CHECK(ka.private_key != kc.private_key);
    CHECK(ka.public_key == derive_public_key(ka.private_key));
}

TEST_CASE("duplicate account registration is rejected but ensure is idempotent") {
    Ledger ledger;
    ledger.create_account("a");
    CHECK_THROWS_AS(ledger.create_account("a"), Error);
    CHECK(ledger.ensure_account("a").id == "a");
    CHECK(ledger.account_count() == 1);
}

TEST_CASE("first transaction of an object starts at the root marker") {
    Ledger ledger;
    ledger.create_account("T");
    ledger.create_account("v1");
    const auto tx =
        ledger.publish_transaction("T", "v1", ObjectId("d"), transfer_tag(TxKind::Bootstrap));
    CHECK(tx.is_root());
    CHECK(tx.prev_hash == Ledger::root_marker());
    REQUIRE(ledger.first_issue("d").has_value());
    CHECK(ledger.first_issue("d")->this_hash == tx.this_hash);
    CHECK_FALSE(ledger.first_issue("missing").has_value());
}

TEST_CASE("a bare base cannot be issued twice") {
    ChainFixture f;
    CHECK_THROWS_AS(
        f.ledger.publish_transaction("T", "v4", ObjectId("d"), transfer_tag(TxKind::Bootstrap)),
        Error);
}

TEST_CASE("each hop chains to the transaction that delivered the asset") {
    ChainFixture f;
    const auto txs = f.ledger.transactions_for_object("d");
    REQUIRE(txs.size() == 3);
    CHECK(txs[1].prev_hash == txs[0].this_hash);
    CHECK(txs[2].prev_hash == txs[1].this_hash);
}

TEST_CASE("ownership rules cover the spend matrix") {
    ChainFixture f;

    SUBCASE("re-spending to a different payee is a double spend") {
        try {
            f.ledger.publish_transaction("v1", "v4", ObjectId("d", {"v2"}),
                                         transfer_tag(TxKind::Link));
            FAIL_CHECK("double spend was accepted");
        } catch (const Error& e) {
            CHECK(e.code() == errc::double_spend);
        }
    }
    SUBCASE("re-spending to the same payee is rejected as not owning") {
        try {
            f.ledger.publish_transaction("v1", "v2", ObjectId("d", {"v2"}),
                                         transfer_tag(TxKind::Link));
            FAIL_CHECK("replayed transfer was accepted");
        } catch (const Error& e) {
            CHECK(e.code() == errc::not_asset_owner);
        }
    }
    SUBCASE("extending a suffix the payer never received is rejected") {
        CHECK_THROWS_AS(f.ledger.publish_transaction("v1", "v4", ObjectId("d", {"v2", "v4"}),
                                                     transfer_tag(TxKind::Link)),
                        Error);
    }
    SUBCASE("extending an unrecorded parent is rejected") {
        CHECK_THROWS_AS(f.ledger.publish_transaction("v1", "v4", ObjectId("d", {"x", "v4"}),
                                                     transfer_tag(TxKind::Link)),
                        Error);
    }
    SUBCASE("the current holder can extend the suffix") {
        CHECK_NOTHROW(f.ledger.publish_transaction("v3", "v4", ObjectId("d", {"v2", "v3", "v4"}),
                                                   transfer_tag(TxKind::Link)));
    }
    SUBCASE("the suffix records the transport path") {
        const auto txs = f.ledger.transactions_for_object("d");
        CHECK(txs.back().asset.str() == "d.v2.v3");
    }
}

TEST_CASE("annotations chain to the payer's latest received transaction") {
    ChainFixture f;
    TagPayload tag;
    tag.kind = TxKind::Shortcut;
    const auto note =
        f.ledger.publish_transaction("v1", "v3", ObjectId("d", {"v2", "v3"}), tag);
    const auto txs = f.ledger.transactions_for_object("d");
    // v1 last received the bootstrap, so the shortcut chains there, and the
    // asset is untouched: v3 still holds d.v2.v3 afterwards.
    CHECK(note.prev_hash == txs[0].this_hash);
    CHECK_NOTHROW(f.ledger.publish_transaction("v3", "v4", ObjectId("d", {"v2", "v3", "v4"}),
                                               transfer_tag(TxKind::Link)));
}

TEST_CASE("annotation on an untouched object starts its chain") {
    Ledger ledger;
    ledger.create_account("a");
    ledger.create_account("b");
    TagPayload tag;
    tag.kind = TxKind::Score;
    const auto tx = ledger.publish_transaction("a", "b", ObjectId("fresh"), tag);
    CHECK(tx.is_root());
}

TEST_CASE("publishing requires both accounts and a valid asset") {
    Ledger ledger;
    ledger.create_account("a");
    CHECK_THROWS_AS(
        ledger.publish_transaction("a", "ghost", ObjectId("d"), transfer_tag(TxKind::Link)),
        Error);
    CHECK_THROWS_AS(
        ledger.publish_transaction("ghost", "a", ObjectId("d"), transfer_tag(TxKind::Link)),
        Error);
    ledger.create_account("b");
    CHECK_THROWS_AS(
        ledger.publish_transaction("a", "b", ObjectId(""), transfer_tag(TxKind::Link)), Error);
}

TEST_CASE("locate_chain groups objects by their issuing root") {
    ChainFixture f;
    f.ledger.publish_transaction("T", "v4", ObjectId("e"), transfer_tag(TxKind::Bootstrap));
    TagPayload score;
    score.kind = TxKind::Score;
    f.ledger.publish_transaction("v1", "v2", ObjectId("side"), score);

    const auto chains = f.ledger.locate_chain("T");
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].object == "d");
    CHECK(chains[0].root == "T");
    CHECK(chains[0].transactions.size() == 3);
    CHECK(chains[1].object == "e");

    // A scan oracle: every transaction of the object, in append order.
    const auto all = f.ledger.all_transactions();
    std::vector<Digest> expect;
    for (const auto& tx : all)
        if (tx.asset.base() == "d") expect.push_back(tx.this_hash);
    REQUIRE(chains[0].transactions.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(chains[0].transactions[i].this_hash == expect[i]);
}

TEST_CASE("verify_chain accepts intact chains and flags tampering") {
    ChainFixture f;
    auto chains = f.ledger.locate_chain("T");
    REQUIRE(chains.size() == 1);

    SUBCASE("intact") {
        const auto report = f.ledger.verify_chain(chains[0]);
        CHECK(report.valid);
        for (const auto& check : report.checks) CHECK(check.ok());
    }
    SUBCASE("payload tampering breaks the hash and poisons later links") {
        chains[0].transactions[1].payee = "v4";
        const auto report = f.ledger.verify_chain(chains[0]);
        CHECK_FALSE(report.valid);
        CHECK_FALSE(report.checks[1].hash_ok);
        CHECK(report.checks[0].ok());
        CHECK_FALSE(report.checks[2].link_ok);   // its predecessor is no longer trustworthy
    }
    SUBCASE("signature tampering is local to the transaction") {
        chains[0].transactions[1].signature[0] ^= 1;
        const auto report = f.ledger.verify_chain(chains[0]);
        CHECK_FALSE(report.valid);
        CHECK(report.checks[1].hash_ok);
        CHECK_FALSE(report.checks[1].signature_ok);
        CHECK(report.checks[2].ok());
    }
    SUBCASE("a broken prev pointer is caught") {
        chains[0].transactions[2].prev_hash[5] ^= 0xff;
        const auto report = f.ledger.verify_chain(chains[0]);
        CHECK_FALSE(report.valid);
        CHECK_FALSE(report.checks[2].hash_ok);   // prev_hash is inside the digest
    }
    SUBCASE("a non-root head is rejected") {
        chains[0].transactions.erase(chains[0].transactions.begin());
        const auto report = f.ledger.verify_chain(chains[0]);
        CHECK_FALSE(report.valid);
        CHECK_FALSE(report.checks[0].link_ok);
    }
}

TEST_CASE("queries slice the log consistently") {
    ChainFixture f;
    CHECK(f.ledger.transactions_from("v1", "d").size() == 1);
    CHECK(f.ledger.received_by("v1", "d").size() == 1);
    CHECK(f.ledger.received_by("v2", "d").size() == 1);
    CHECK(f.ledger.locate_transactions("v1", "v2", "d").size() == 1);
    CHECK(f.ledger.locate_transactions("v1", "v3", "d").empty());
    CHECK(f.ledger.has_transaction("v1", "v2", "d", TxKind::Link));
    CHECK_FALSE(f.ledger.has_transaction("v1", "v2", "d", TxKind::Shortcut));
    CHECK(f.ledger.objects_issued_by("T") == std::vector<std::string>{"d"});
    CHECK(f.ledger.all_objects() == std::vector<std::string>{"d"});
}

TEST_CASE("link_transactions returns one link's publishes in order") {
    Ledger ledger;
    for (const char* id : {"T", "u", "v"}) ledger.create_account(id);
    ledger.publish_transaction("T", "u", ObjectId("d"), transfer_tag(TxKind::Bootstrap));
    ledger.publish_transaction("u", "u", ObjectId("d", {"v"}), transfer_tag(TxKind::Link, "l1"));
    ledger.publish_transaction("u", "v", ObjectId("d", {"v"}), transfer_tag(TxKind::Link, "l1"));
    const auto txs = ledger.link_transactions("d", "l1");
    REQUIRE(txs.size() == 2);
    CHECK(txs[0].payee == "u");
    CHECK(txs[1].payee == "v");
    CHECK(ledger.link_transactions("d", "l2").empty());
}

TEST_CASE("timestamps are a strictly increasing logical clock") {
    ChainFixture f;
    const auto txs = f.ledger.all_transactions();
    for (std::size_t i = 0; i + 1 < txs.size(); ++i)
        CHECK(txs[i].tag.timestamp < txs[i + 1].tag.timestamp);
}

TEST_CASE("1000 random transfers verify end to end") {
    Ledger ledger;
    ledger.set_key_seed(77);
    const int kAccounts = 12;
    std::vector<std::string> nodes{"T"};
    ledger.create_account("T");
    for (int i = 0; i < kAccounts; ++i) {
        nodes.push_back("a" + std::to_string(i));
        ledger.create_account(nodes.back());
    }

    // Several objects hop around at random; each object tracks its holder
    // and current suffix so every publish is legal by construction.
    RngStream rng(99, "ledger-fuzz");
    std::uint64_t counter = 0;
    struct Live {
        std::string holder;
        ObjectId asset;
    };
    std::vector<Live> objects;
    for (int i = 0; i < 8; ++i) {
        const std::string base = "obj" + std::to_string(i);
        const std::string first = nodes[1 + rng.range(counter++, 0, kAccounts - 1)];
        ledger.publish_transaction("T", first, ObjectId(base), transfer_tag(TxKind::Bootstrap));
        objects.push_back({first, ObjectId(base)});
    }
    for (int step = 0; step < 992; ++step) {
        Live& obj = objects[rng.range(counter++, 0, objects.size() - 1)];
        std::string next = nodes[1 + rng.range(counter++, 0, kAccounts - 1)];
        if (next == obj.holder) next = next == "a0" ? "a1" : "a0";
        obj.asset = obj.asset.extended(next);
        ledger.publish_transaction(obj.holder, next, obj.asset, transfer_tag(TxKind::Link));
        obj.holder = next;
    }

    CHECK(ledger.size() == 1000);
    for (const auto& chain : ledger.locate_chain("T")) {
        const auto report = ledger.verify_chain(chain);
        CHECK(report.valid);
    }
}

TEST_CASE("single byte tampering anywhere is detected") {
    ChainFixture f;
    const auto chains = f.ledger.locate_chain("T");
    REQUIRE(chains.size() == 1);

    for (std::size_t t = 0; t < chains[0].transactions.size(); ++t) {
        // Flip one byte in each mutable field in turn.
        for (int field = 0; field < 4; ++field) {
            auto copy = chains[0];
            auto& tx = copy.transactions[t];
            switch (field) {
            case 0: tx.payer += "x"; break;
            case 1: tx.payee += "x"; break;
            case 2: tx.tag.attributes["evil"] = "1"; break;
            case 3: tx.signature.back() ^= 0x80; break;
            }
            CAPTURE(t);
            CAPTURE(field);
            CHECK_FALSE(f.ledger.verify_chain(copy).valid);
        }
    }
}

TEST_CASE("a file-backed ledger reloads to the identical log") {
    const auto dir = std::filesystem::temp_directory_path() / "sln_ledger_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "roundtrip.sln";
    std::filesystem::remove(path);

    std::ostringstream before;
    {
        Ledger ledger(path);
        ledger.set_key_seed(5);
        for (const char* id : {"T", "v1", "v2"}) ledger.create_account(id);
        ledger.publish_transaction("T", "v1", ObjectId("d"), transfer_tag(TxKind::Bootstrap));
        ledger.publish_transaction("v1", "v2", ObjectId("d", {"v2"}),
                                   transfer_tag(TxKind::Link, "l1"));
        ledger.write_log(before);
    }
    {
        Ledger reloaded(path);
        std::ostringstream after;
        reloaded.write_log(after);
        CHECK(after.str() == before.str());
        CHECK(reloaded.size() == 2);
        CHECK(reloaded.account_count() == 3);
        // The reloaded ledger keeps working where the first left off.
        reloaded.create_account("v3");
        CHECK_NOTHROW(reloaded.publish_transaction("v2", "v3", ObjectId("d", {"v2", "v3"}),
                                                   transfer_tag(TxKind::Link, "l2")));
        for (const auto& chain : reloaded.locate_chain("T"))
            CHECK(reloaded.verify_chain(chain).valid);
    }
    std::filesystem::remove(path);
}

TEST_CASE("an in-memory log serializes with the file magic") {
    Ledger ledger;
    ledger.create_account("T");
    std::ostringstream out;
    ledger.write_log(out);
    CHECK(out.str().substr(0, 5) == "SLNC1");
}

TEST_CASE("opening a corrupt file reports a parse error") {
    const auto dir = std::filesystem::temp_directory_path() / "sln_ledger_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "corrupt.sln";
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTALEDGER";
    }
    CHECK_THROWS_AS(Ledger{path}, Error);
    std::filesystem::remove(path);
}
