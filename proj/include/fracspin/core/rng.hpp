#pragma once

#include <cmath>
#include <cstdint>

namespace fracspin::core {

// Counter-based uniform stream (splitmix64). The state is an affine counter,
// so the k-th draw is a pure function of (seed, k); streams for different
// seeds are statistically independent for our purposes.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1); never returns exactly 0 (safe for log())
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; consumes exactly two uniforms per pair
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Derives an independent child seed, e.g. one per worker trajectory.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    RandomStream s(master ^ (0x6a09e667f3bcc909ULL * (index + 1)));
    s.next_u64();
    return s.next_u64();
}

} // namespace fracspin::core
