#include "rtp/random.hpp"

#include <numeric>

namespace rtp {

std::vector<std::size_t> sampled_indices(std::size_t population, std::size_t take, std::uint64_t seed) {
    std::vector<std::size_t> indices(population);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (take > population) take = population;

    // Partial Fisher-Yates: only the first `take` positions need settling.
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(take);
    return indices;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char c : s) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    SplitMix64 rng(seed ^ (salt + 0x9E3779B97F4A7C15ULL));
    return rng.next();
}

}  // namespace rtp
