#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace foresight {

struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// One independent generator per (seed, stream) pair.
//
// The engine is std::mt19937_64 keyed through std::seed_seq, both of which the
// standard specifies bit for bit. Uniforms take the top 53 bits of each draw
// and are centred in their bucket, so they live in the open interval (0, 1).
// Gaussians come from the basic Box-Muller transform; the sine variate of each
// pair is cached and returned by the next call.
class StreamRng {
public:
    explicit StreamRng(SeedSpec s) : engine_(make_engine(s)) {}

    double uniform() noexcept {
        constexpr double scale = 0x1.0p-53;
        return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
    }

    double gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    // Integer uniformly distributed on [lo, hi]; modulo bias is negligible for
    // the small ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

private:
    static std::mt19937_64 make_engine(SeedSpec s) {
        std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                          static_cast<std::uint32_t>(s.stream), static_cast<std::uint32_t>(s.stream >> 32)};
        return std::mt19937_64(seq);
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace foresight
