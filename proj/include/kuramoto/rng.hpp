#pragma once

#include <cmath>
#include <cstdint>

namespace kuramoto {

// Counter-based pseudo-random generator built on the splitmix64 finalizer.
//
// Every value is a pure function of (key, counter), so streams can be split
// by key without consuming state from each other: simulations derive one
// stream per (step, particle) and samplers one stream per chunk, which keeps
// results reproducible independent of ensemble size or thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(derive_key(seed, stream)) {}

    // Independent generator; order of substream() calls does not matter.
    Rng substream(std::uint64_t id) const {
        Rng child(*this);
        child.key_ = mix64(key_ ^ mix64(id ^ 0x8f9a6c34d2d1b3e5ull));
        child.ctr_ = 0;
        child.have_spare_ = false;
        return child;
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one cached deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Stateless draw addressed by (seed, a, b): the noise source for
    // integrators, where a = step index and b = particle index.
    static double normal_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        std::uint64_t k = mix64(mix64(mix64(seed) ^ a) ^ b);
        double u1 = (static_cast<double>(mix64(k + 1) >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(mix64(k + 2) >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    static std::uint64_t mix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix64(mix64(seed) ^ mix64(stream ^ 0x5851f42d4c957f2dull));
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace kuramoto
