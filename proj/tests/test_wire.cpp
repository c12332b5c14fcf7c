#include "doctest.h"

#include <stdexcept>

#include "sln/wire.hpp"

using namespace sln;

TEST_CASE("integers are little-endian and round-trip") {
    ByteWriter w;
    w.put_u8(0xab);
    w.put_u32(0x01020304u);
    w.put_u64(0x1122334455667788ull);
    const Bytes& b = w.bytes();
    REQUIRE(b.size() == 13);
    CHECK(b[0] == 0xab);
    CHECK(b[1] == 0x04);   // u32 low byte first
    CHECK(b[4] == 0x01);
    CHECK(b[5] == 0x88);   // u64 low byte first

    ByteReader r(b);
    CHECK(r.get_u8() == 0xab);
    CHECK(r.get_u32() == 0x01020304u);
    CHECK(r.get_u64() == 0x1122334455667788ull);
    CHECK(r.done());
}

TEST_CASE("strings and blobs carry a u32 length prefix") {
    ByteWriter w;
    w.put_str("hi");
    w.put_blob(Bytes{1, 2, 3});
    const Bytes& b = w.bytes();
    REQUIRE(b.size() == 4 + 2 + 4 + 3);
    CHECK(b[0] == 2);   // "hi" length

    ByteReader r(b);
    CHECK(r.get_str() == "hi");
    CHECK(r.get_blob() == Bytes{1, 2, 3});
    CHECK(r.done());
}

TEST_CASE("empty string and digest round-trip") {
    ByteWriter w;
    w.put_str("");
    Digest d{};
    d[0] = 7;
    d[31] = 9;
    w.put_raw(d);
    ByteReader r(w.bytes());
    CHECK(r.get_str().empty());
    CHECK(r.get_digest() == d);
    CHECK(r.done());
}

TEST_CASE("reading past the end throws") {
    ByteWriter w;
    w.put_u8(1);
    ByteReader r(w.bytes());
    r.get_u8();
    CHECK_THROWS_AS(r.get_u32(), std::exception);
}

TEST_CASE("truncated length prefix throws") {
    Bytes data = {0xff, 0xff, 0xff, 0x7f};   // announces ~2G payload
    ByteReader r(data);
    CHECK_THROWS_AS(r.get_blob(), std::exception);
}
