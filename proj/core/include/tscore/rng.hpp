#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tscore
{

using Engine = std::mt19937_64;

// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr auto splitmix64(std::uint64_t x) noexcept -> std::uint64_t
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

// Derives an independent stream key from a parent key and a child index.
constexpr auto derive_key(std::uint64_t parent, std::uint64_t child) noexcept
    -> std::uint64_t
{
    return splitmix64(splitmix64(parent) ^ (child + 0x632be59bd9b4e019ULL));
}

// FNV-1a; stable across platforms, unlike std::hash.
constexpr auto stable_hash(std::string_view s) noexcept -> std::uint64_t
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s)
    {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Engine seeded from a derived key. Used for per-replicate and per-gene
// streams so results do not depend on scheduling.
auto make_engine(std::uint64_t key) -> Engine;

// Counter-based standard normal draw: a pure function of (key, index).
// Box-Muller on two hashed 53-bit uniforms.
auto keyed_normal(std::uint64_t key, std::uint64_t index) noexcept -> double;

}  // namespace tscore
