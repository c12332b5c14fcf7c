#include "sln/wire.hpp"

#include "sln/errors.hpp"

namespace sln {

void ByteReader::need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(errc::parse_error, "truncated record");
}

std::uint8_t ByteReader::get_u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t ByteReader::get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
}

std::uint64_t ByteReader::get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
}

Bytes ByteReader::get_raw(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

Bytes ByteReader::get_blob() {
    std::uint32_t n = get_u32();
    return get_raw(n);
}

std::string ByteReader::get_str() {
    std::uint32_t n = get_u32();
    need(n);
    std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return out;
}

Digest ByteReader::get_digest() {
    need(32);
    Digest d{};
    for (int i = 0; i < 32; ++i) d[i] = data_[pos_++];
    return d;
}

} // namespace sln
