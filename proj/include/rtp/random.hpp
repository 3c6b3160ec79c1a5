#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace rtp {

// SplitMix64 generator. Used instead of <random> engines+distributions so that
// seeded runs produce identical output on every platform and standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased draw in [0, n) via rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
};

// First `take` indices of a seeded Fisher-Yates permutation of [0, population).
std::vector<std::size_t> sampled_indices(std::size_t population, std::size_t take, std::uint64_t seed);

std::uint64_t fnv1a64(std::string_view s);

// Derives an independent stream seed from (seed, salt).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace rtp
