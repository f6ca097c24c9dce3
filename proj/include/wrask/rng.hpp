#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <random>

namespace wrask {

/// SplitMix64 finalizer; used to derive independent child seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// Child seed for a (stream, index) pair under a master seed.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                                  std::uint64_t index) noexcept {
    return mix64(mix64(mix64(master) ^ stream) ^ index);
}

/// Stable 64-bit FNV-1a hash for turning labels into stream ids.
[[nodiscard]] constexpr std::uint64_t hash_label(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// mt19937_64 engine with hand-written conversions.
///
/// The standard distributions are implementation-defined, so uniform reals,
/// bounded integers and normals are derived here from raw 64-bit words. The
/// index stream for a given seed is the same on every conforming platform.
namespace detail {
__extension__ typedef unsigned __int128 uint128;
}  // namespace detail

class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11U) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t uniform_index(std::uint64_t bound) {
        if (bound <= 1) {
            return 0;
        }
        detail::uint128 product = static_cast<detail::uint128>(next_u64()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<detail::uint128>(next_u64()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64U);
    }

    /// Standard normal draw (Marsaglia polar method).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    [[nodiscard]] SeededRng child(std::uint64_t stream, std::uint64_t index) const {
        return SeededRng(derive_seed(seed_, stream, index));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wrask
