#include "sln/hash.hpp"

#include <array>
#include <cstring>

#include <openssl/evp.h>

namespace sln {
namespace {

// OpenSSL 3 re-resolves the algorithm on every one-shot call, which
// dominates the cost of hashing short inputs. Fetching the digest once per
// thread and reusing one context keeps the fast path free of lookups.
struct Sha256Engine {
    EVP_MD* md = EVP_MD_fetch(nullptr, "SHA2-256", nullptr);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();

    ~Sha256Engine() {
        EVP_MD_CTX_free(ctx);
        EVP_MD_free(md);
    }
};

Sha256Engine& engine() {
    thread_local Sha256Engine instance;
    return instance;
}

} // namespace

Digest sha256(std::span<const std::uint8_t> data) {
    Sha256Engine& e = engine();
    Digest out{};
    unsigned int len = 0;
    EVP_DigestInit_ex2(e.ctx, e.md, nullptr);
    if (!data.empty()) EVP_DigestUpdate(e.ctx, data.data(), data.size());
    EVP_DigestFinal_ex(e.ctx, out.data(), &len);
    return out;
}

Digest sha256(std::string_view text) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg) {
    // RFC 2104 with SHA-256: block size 64; long keys are hashed first.
    std::array<std::uint8_t, 64> padded{};
    if (key.size() > padded.size()) {
        const Digest hashed = sha256(key);
        std::memcpy(padded.data(), hashed.data(), hashed.size());
    } else if (!key.empty()) {
        std::memcpy(padded.data(), key.data(), key.size());
    }

    std::array<std::uint8_t, 64> pad;
    for (std::size_t i = 0; i < padded.size(); ++i) pad[i] = padded[i] ^ 0x36;

    Sha256Engine& e = engine();
    Digest inner{};
    unsigned int len = 0;
    EVP_DigestInit_ex2(e.ctx, e.md, nullptr);
    EVP_DigestUpdate(e.ctx, pad.data(), pad.size());
    if (!msg.empty()) EVP_DigestUpdate(e.ctx, msg.data(), msg.size());
    EVP_DigestFinal_ex(e.ctx, inner.data(), &len);

    for (std::size_t i = 0; i < padded.size(); ++i) pad[i] = padded[i] ^ 0x5c;
    Digest out{};
    EVP_DigestInit_ex2(e.ctx, e.md, nullptr);
    EVP_DigestUpdate(e.ctx, pad.data(), pad.size());
    EVP_DigestUpdate(e.ctx, inner.data(), inner.size());
    EVP_DigestFinal_ex(e.ctx, out.data(), &len);
    return out;
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

} // namespace sln
