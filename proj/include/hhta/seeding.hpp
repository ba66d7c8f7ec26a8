#pragma once

#include <cstdint>

namespace hhta {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives the seed of stream `index` from a master seed. Streams are
/// addressed by index, so results never depend on scheduling order.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

}  // namespace hhta
