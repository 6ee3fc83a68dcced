#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace rlcore {

/// Derives an independent child seed from a master seed and a stable component
/// label ("env", "policy", "agent", "replay", ...). The label is folded in with
/// FNV-1a and the result finalized with the splitmix64 mixer, so reordering
/// component construction cannot silently change a stream.
inline std::uint64_t split_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    std::uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seedable PRNG owned by exactly one component. All transforms are implemented
/// here (not via std distributions) so draw sequences are pinned by this file.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    void seed(std::uint64_t s) { gen_.seed(s); }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n). Lemire multiply-shift; n must be positive.
    std::int64_t uniform_int(std::int64_t n) {
        const auto un = static_cast<std::uint64_t>(n);
        const auto m = static_cast<unsigned __int128>(next_u64()) * un;
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(m >> 64));
    }

    /// Standard normal via Box-Muller. Stateless: every call consumes exactly
    /// two generator words.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

private:
    std::mt19937_64 gen_;
};

} // namespace rlcore
