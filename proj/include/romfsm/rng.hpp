#pragma once

#include <cstdint>
#include <random>

namespace romfsm {

// All randomness in an experiment flows from one master seed. Substreams are
// derived with splitmix64 so the same master seed always produces the same
// initial phases and the same observation noise, independently of each other.
enum class RngStream : std::uint64_t {
    initial_phases = 0,     // 2D spectrum phase draw
    observation_noise = 1,  // measurement noise
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, RngStream stream) {
    return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream) + 0x51ed2701));
}

/// mt19937_64 with hand-rolled uniform/normal transforms. The standard
/// library's distributions are implementation-defined, so we avoid them to
/// keep outputs bit-identical across toolchains.
class Rng {
public:
    Rng(std::uint64_t master_seed, RngStream stream)
        : eng_(derive_seed(master_seed, stream)) {}

    explicit Rng(std::uint64_t raw_seed) : eng_(raw_seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller; draws two uniforms per pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace romfsm
