#pragma once

#include <cstdint>
#include <initializer_list>

namespace sptest {

/// Stateless 64-bit finalizer (splitmix64 / Stafford variant 13).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * @brief Counter-based random stream.
 *
 * The k-th output is a pure function of (key, k), where the key is derived
 * from a master seed and a list of integers (replicate index, substream id,
 * ...). Two streams with the same key produce the same sequence regardless of
 * which thread constructs them or in which order replicates are evaluated.
 */
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

    [[nodiscard]] std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() noexcept;

    /// Uniform on (0, 1); never returns 0.
    [[nodiscard]] double uniform_open() noexcept;

    /// Standard normal via Box-Muller; caches the second variate.
    [[nodiscard]] double normal() noexcept;

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// Substream identifiers shared across modules.
namespace stream {
inline constexpr std::uint64_t kRegressors = 1;
inline constexpr std::uint64_t kIndividualEffects = 2;
inline constexpr std::uint64_t kErrors = 3;
inline constexpr std::uint64_t kBootstrap = 4;
}  // namespace stream

}  // namespace sptest
