#pragma once

#include <array>
#include <cstdint>

namespace slb {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Deterministic stream keyed by (master_seed, trial_id, round_index).
///
/// The bit source is xoshiro256**; its state is filled by SplitMix64 from a
/// hash of the three keys, so streams for different keys are unrelated and
/// a given key gives the same draws on every platform.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t trial_id, std::uint64_t round_index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    /// Stream with an explicit xoshiro256** state (must not be all zero).
    static RngStream from_state(const std::array<std::uint64_t, 4>& state) noexcept {
        RngStream r;
        r.s_ = state;
        return r;
    }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_pos() noexcept {
        double u;
        do u = uniform(); while (u == 0.0);
        return u;
    }

private:
    RngStream() = default;
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace slb
