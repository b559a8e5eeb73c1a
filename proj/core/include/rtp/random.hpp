#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rtp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the sub-stream reached from `seed` along `path`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = mix64(seed);
    for (auto p : path)
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Roles of the independent streams consumed by one replica.
enum class StreamRole : std::uint64_t {
    particle1 = 1,
    particle2 = 2,
    particle1_shadow = 3,
    particle2_shadow = 4,
    ring1 = 5,
    ring2 = 6,
    init = 7,
    sampling = 8,
};

class Stream {
  public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed) : engine_(mix64(seed)) {}
    Stream(std::uint64_t seed, std::uint64_t replica, StreamRole role)
        : engine_(derive_seed(seed, {replica, static_cast<std::uint64_t>(role)}))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

    /// Uniform on the open interval (0,1).
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    bool coin() { return (engine_() >> 63) != 0; }

  private:
    std::mt19937_64 engine_;
};

} // namespace rtp
