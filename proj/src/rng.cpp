#include "selfish_lb/rng.hpp"

namespace slb {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t trial_id, std::uint64_t round_index) noexcept {
    // Chain the keys through the mixer; each absorption is a bijection of the
    // running key, so distinct triples give distinct seeds w.h.p.
    std::uint64_t k = master_seed;
    std::uint64_t key = splitmix64(k);
    k = key ^ trial_id;
    key = splitmix64(k);
    k = key ^ round_index;
    std::uint64_t state = splitmix64(k);
    for (auto& w : s_) w = splitmix64(state);
}

RngStream::result_type RngStream::operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

}  // namespace slb
