#pragma once

// Seeded random streams. Every stream is keyed by (master seed, index,
// purpose) so results never depend on the order in which streams are used.
// Normal deviates come from a fixed transform of mt19937_64 output, keeping
// sequences identical across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace foldhinge::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class Purpose : std::uint64_t {
    Elevon = 1,
    Gust = 2,
    Test = 3,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, Purpose purpose) {
    return splitmix64(splitmix64(splitmix64(master) ^ index) ^ static_cast<std::uint64_t>(purpose));
}

class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform deviate on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Marsaglia polar method).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u;
        double v;
        double s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace foldhinge::rng
