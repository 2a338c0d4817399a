#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace platekit {

// splitmix64 finalizer; decorrelates derived seeds.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from (base, domain label, index).
// All randomness in the toolkit flows through these derived seeds so that
// parallel workers never share generator state.
inline uint64_t derive_seed(uint64_t base, std::string_view domain, uint64_t index = 0) {
    uint64_t h = 0xcbf29ce484222325ull; // FNV-1a
    for (char c : domain) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return mix64(base ^ mix64(h) ^ mix64(index * 0x9e3779b97f4a7c15ull + 1));
}

inline std::mt19937_64 make_rng(uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace platekit
