#ifndef FASTHZ_RANDOM_HPP
#define FASTHZ_RANDOM_HPP

// Counter-based normal streams. Every Monte Carlo trial owns the stream
// keyed by (seed, trial_index), so draws do not depend on which worker runs
// the trial or in which order.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include <boost/math/constants/constants.hpp>

namespace fasthz {

/// Philox4x32-10 block cipher (Salmon et al., SC'11).
class Philox4x32 {
public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static counter_type encrypt(counter_type ctr, key_type key) {
        std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * c0;
            const std::uint64_t p1 = std::uint64_t{kMul1} * c2;
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return {c0, c1, c2, c3};
    }

    /// Encrypts N counters under one key, rounds interleaved.
    template <std::size_t N>
    static void encrypt_many(std::array<counter_type, N>& ctrs, key_type key) {
        for (int round = 0; round < 10; ++round) {
            for (auto& c : ctrs) {
                const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
                const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
                c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0], static_cast<std::uint32_t>(p1),
                     static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            }
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Standard normal variates for one (seed, stream) pair, Box-Muller on
/// consecutive Philox blocks. Blocks are encrypted four at a time so the
/// multiply chains of independent counters overlap.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)), stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    double next() {
        if (pos_ == kBuffered) refill();
        return buffer_[pos_++];
    }

private:
    static constexpr int kBlocks = 4;
    static constexpr int kBuffered = 2 * kBlocks;

    void refill() {
        std::array<Philox4x32::counter_type, kBlocks> blocks;
        for (int i = 0; i < kBlocks; ++i) {
            const std::uint64_t ctr = block_ + static_cast<std::uint64_t>(i);
            blocks[i] = {static_cast<std::uint32_t>(ctr), static_cast<std::uint32_t>(ctr >> 32), stream_lo_,
                         stream_hi_};
        }
        block_ += kBlocks;
        Philox4x32::encrypt_many(blocks, key_);
        for (int i = 0; i < kBlocks; ++i) {
            const auto& block = blocks[i];
            const std::uint64_t a = (std::uint64_t{block[0]} << 32) | block[1];
            const std::uint64_t b = (std::uint64_t{block[2]} << 32) | block[3];
            // (0, 1] so the logarithm is finite
            const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
            const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = boost::math::constants::two_pi<double>() * u2;
            buffer_[2 * i] = radius * std::cos(angle);
            buffer_[2 * i + 1] = radius * std::sin(angle);
        }
        pos_ = 0;
    }

    Philox4x32::key_type key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    std::array<double, kBuffered> buffer_{};
    int pos_ = kBuffered;
};

} // namespace fasthz

#endif // FASTHZ_RANDOM_HPP
