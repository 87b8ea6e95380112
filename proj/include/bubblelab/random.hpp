#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace bubblelab {

/// The random stream every stochastic operation takes explicitly. Wraps
/// std::mt19937_64; uniform doubles use the top 53 bits so draws are
/// identical across standard-library implementations.
class Rng {
public:
    using result_type = std::mt19937_64::result_type;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t floor = (0 - bound) % bound;
            while (low < floor) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates over `below`, so the result does not depend on the standard library.
template <class T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::swap(values[i - 1], values[static_cast<std::size_t>(rng.below(i))]);
    }
}

}  // namespace bubblelab
