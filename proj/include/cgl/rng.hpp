#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "cgl/lattice.hpp"

namespace cgl {

// Counter-based generator: every draw is a pure function of
// (master seed, stream index, counter), so replicas, threads and platforms
// see identical sequences and any site's weight can be regenerated in O(1).
//
// The key is (seed, stream); the 256-bit counter carries a domain tag so
// different uses of one stream (weights, walks, clocks, ...) never collide.

namespace domain {
inline constexpr uint64_t generic = 0;
inline constexpr uint64_t weights = 1;
inline constexpr uint64_t alpha_walk = 2;
inline constexpr uint64_t beta_walk = 3;
inline constexpr uint64_t clocks = 4;
inline constexpr uint64_t profile = 5;       // occupation draws left of the origin
inline constexpr uint64_t bootstrap = 6;
inline constexpr uint64_t profile_right = 7; // occupation draws right of the origin
} // namespace domain

// Philox4x64-10 block function (Random123 constants and round order; the
// unit tests pin it with frozen vectors from both the Random123 known-answer
// set and numpy.random.Philox, which emits the block at counter+1).
inline std::array<uint64_t, 4> philox4x64(uint64_t k0, uint64_t k1,
                                          uint64_t c0, uint64_t c1,
                                          uint64_t c2, uint64_t c3) {
    constexpr uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    constexpr uint64_t M1 = 0xCA5A826395121157ULL;
    constexpr uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    constexpr uint64_t W1 = 0xBB67AE8584CAA73BULL;
    for (int r = 0;; ++r) {
        const unsigned __int128 p0 = (unsigned __int128)M0 * c0;
        const unsigned __int128 p1 = (unsigned __int128)M1 * c2;
        const uint64_t hi0 = (uint64_t)(p0 >> 64), lo0 = (uint64_t)p0;
        const uint64_t hi1 = (uint64_t)(p1 >> 64), lo1 = (uint64_t)p1;
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        if (r == 9) break;
        k0 += W0;
        k1 += W1;
    }
    return {c0, c1, c2, c3};
}

// Identifies one logical random stream. Distinct stream indices give
// independent sequences (different Philox keys share no counter state).
struct RngStream {
    uint64_t seed = 0;
    uint64_t stream = 0;

    std::array<uint64_t, 4> block(uint64_t c0, uint64_t c1, uint64_t c2,
                                  uint64_t c3) const {
        return philox4x64(seed, stream, c0, c1, c2, c3);
    }
};

// Map to the open interval (0,1): 52 high bits plus a half-ulp offset. All
// values land exactly on (k + 0.5) * 2^-52, so 0 and 1 are unreachable and
// -log1p(-u) below is strictly positive and finite.
inline double u64_to_unit(uint64_t v) {
    return ((double)(v >> 12) + 0.5) * 0x1.0p-52;
}

// Exponential(mean 1) by inverse transform -ln(1-u).
inline double exp1_from_bits(uint64_t v) { return -std::log1p(-u64_to_unit(v)); }

// Coordinates are biased into u64 so negative sites key cleanly.
inline constexpr uint64_t coord_bias = 1ULL << 40;
inline uint64_t biased(int32_t c) { return (uint64_t)((int64_t)c + (int64_t)coord_bias); }

// One u64 of bits per lattice site, pure in (stream, site): four consecutive
// x-sites share a Philox block, so row sweeps amortize the block function.
inline uint64_t site_bits(RngStream s, Site z) {
    const uint64_t ux = biased(z.x);
    return s.block(ux >> 2, biased(z.y), domain::weights, 0)[ux & 3];
}

inline double site_exp1(RngStream s, Site z) { return exp1_from_bits(site_bits(s, z)); }

// Sequential counter view over one domain of a stream.
class SequentialRng {
  public:
    SequentialRng(RngStream s, uint64_t dom) : s_(s), dom_(dom) {}

    uint64_t next_u64() {
        if ((n_ & 3) == 0) buf_ = s_.block(n_ >> 2, dom_, 0, 0);
        return buf_[n_++ & 3];
    }
    double unit() { return u64_to_unit(next_u64()); }
    double exp1() { return -std::log1p(-unit()); }
    bool bernoulli(double p) { return unit() < p; }

  private:
    RngStream s_;
    uint64_t dom_;
    uint64_t n_ = 0;
    std::array<uint64_t, 4> buf_{};
};

// Per-site Poisson clock: the k-th epoch gap of a given site is keyed by
// (site, k), so enlarging the window never changes existing clocks.
class SiteClock {
  public:
    SiteClock(RngStream s, int32_t site) : s_(s), site_(biased(site)) {}

    double next_gap() {
        if ((k_ & 3) == 0) buf_ = s_.block(k_ >> 2, site_, domain::clocks, 0);
        return exp1_from_bits(buf_[k_++ & 3]);
    }

  private:
    RngStream s_;
    uint64_t site_;
    uint64_t k_ = 0;
    std::array<uint64_t, 4> buf_{};
};

} // namespace cgl
