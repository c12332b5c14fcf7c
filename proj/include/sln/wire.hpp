#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "sln/hash.hpp"

namespace sln {

// Canonical byte serialization: little-endian fixed-width integers and
// u32-length-prefixed strings/blobs. Transaction hashing, signatures and
// the on-disk log all use exactly this encoding.

class ByteWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(v); }

    void put_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_raw(std::span<const std::uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }

    void put_blob(std::span<const std::uint8_t> data) {
        put_u32(static_cast<std::uint32_t>(data.size()));
        put_raw(data);
    }

    void put_str(std::string_view s) {
        put_u32(static_cast<std::uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t get_u8();
    std::uint32_t get_u32();
    std::uint64_t get_u64();
    Bytes get_raw(std::size_t n);
    Bytes get_blob();
    std::string get_str();
    Digest get_digest();

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace sln
