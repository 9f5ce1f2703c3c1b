#pragma once

#include <cmath>
#include <cstdint>

namespace fcm {

// splitmix64: tiny, fast, and fully specified, so streams are reproducible
// bit-for-bit regardless of the standard library in use.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mix an extra word into a seed (used to derive independent per-sample
// streams from a base seed plus grid coordinates).
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t word) {
    std::uint64_t s = seed ^ (word + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // standard normal via Box-Muller (deterministic, no impl-defined
    // std::normal_distribution state)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(6.283185307179586477 * u2);
        have_spare_ = true;
        return r * std::cos(6.283185307179586477 * u2);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fcm
