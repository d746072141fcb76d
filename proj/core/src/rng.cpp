#include "tscore/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace tscore
{

namespace
{

// Uniform on the open interval (0, 1) from the top 53 bits.
auto to_open_unit(std::uint64_t bits) noexcept -> double
{
    return (static_cast<double>(bits >> 11U) + 0.5) * 0x1.0p-53;
}

}  // namespace

auto make_engine(std::uint64_t key) -> Engine
{
    std::array<std::uint32_t, 4> words{};
    std::uint64_t a = splitmix64(key);
    std::uint64_t b = splitmix64(a);
    words[0] = static_cast<std::uint32_t>(a);
    words[1] = static_cast<std::uint32_t>(a >> 32U);
    words[2] = static_cast<std::uint32_t>(b);
    words[3] = static_cast<std::uint32_t>(b >> 32U);
    std::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

auto keyed_normal(std::uint64_t key, std::uint64_t index) noexcept -> double
{
    const std::uint64_t base = derive_key(key, index);
    const double u1 = to_open_unit(splitmix64(base));
    const double u2 = to_open_unit(splitmix64(base ^ 0xd1b54a32d192ed03ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tscore
