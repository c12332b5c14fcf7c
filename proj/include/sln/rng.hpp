#pragma once

#include <cstdint>
#include <string_view>

namespace sln {

// Counter-based pseudo-random values: every draw is a pure function of
// (seed, stream labels, counter), so simulations replay exactly from the
// same seed regardless of call order elsewhere.

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

// Uniform double in [0, 1) from 64 random bits.
constexpr double unit_real(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// A named sub-stream of the global seed. Draws are indexed explicitly.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label)
        : base_(combine(seed, fnv1a64(label))) {}

    RngStream(std::uint64_t seed, std::string_view label, std::uint64_t index)
        : base_(combine(combine(seed, fnv1a64(label)), index)) {}

    std::uint64_t bits(std::uint64_t counter) const noexcept { return mix64(base_ ^ counter * 0xd1342543de82ef95ull); }
    double uniform(std::uint64_t counter) const noexcept { return unit_real(bits(counter)); }

    // Uniform integer in [lo, hi] (inclusive).
    std::uint64_t range(std::uint64_t counter, std::uint64_t lo, std::uint64_t hi) const noexcept {
        return lo + bits(counter) % (hi - lo + 1);
    }

private:
    std::uint64_t base_;
};

// Sequential counter over a stream, for Monte-Carlo style loops.
class SequentialRng {
public:
    explicit SequentialRng(std::uint64_t seed, std::string_view label = "seq")
        : stream_(seed, label) {}

    std::uint64_t next_bits() noexcept { return stream_.bits(counter_++); }
    double next_uniform() noexcept { return unit_real(next_bits()); }
    std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) noexcept {
        return lo + next_bits() % (hi - lo + 1);
    }

private:
    RngStream stream_;
    std::uint64_t counter_ = 0;
};

} // namespace sln
