#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace robrenyi {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// A (seed, stream) pair selects an independent stream, so parallel
// Monte Carlo replicates can draw from disjoint streams without any
// shared state. Advancing is just incrementing a 128-bit counter.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0,
                   static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            block_ = round10(counter_, key_);
            bump_counter();
            pos_ = 0;
        }
        return block_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform on (0, 1]: 53 random bits, never exactly zero.
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller transform; produces two normals per pair of uniforms
    // and caches the second one.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double exponential(double mean) { return -mean * std::log(uniform()); }

private:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Block round10(Block ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
            Block next;
            next[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
            next[1] = static_cast<std::uint32_t>(p1);
            next[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
            next[3] = static_cast<std::uint32_t>(p0);
            ctr = next;
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    void bump_counter() {
        if (++counter_[0] == 0) ++counter_[1];
    }

    Key key_;
    Block counter_;
    Block block_{};
    int pos_ = 4;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace robrenyi
