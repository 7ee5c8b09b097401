#include "sptest/random.hpp"

#include <cmath>
#include <numbers>

namespace sptest {

CounterStream::CounterStream(std::uint64_t seed,
                             std::initializer_list<std::uint64_t> path) noexcept
    : key_(mix64(seed)) {
    for (std::uint64_t p : path) {
        key_ = mix64(key_ ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
}

std::uint64_t CounterStream::next_u64() noexcept {
    const std::uint64_t c = counter_++;
    return mix64(key_ ^ mix64(c * 0xd1b54a32d192ed03ULL + 1));
}

double CounterStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterStream::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterStream::normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

}  // namespace sptest
