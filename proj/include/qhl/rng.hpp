#pragma once

#include <cmath>
#include <cstdint>

namespace qhl {

// splitmix64, Vigna's public-domain mixer. Used both for seed derivation and
// for seeding the main engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based per-stream seed derivation. The full recipe, bit for bit:
//   s0 = splitmix64(master ^ splitmix64(stream_tag))
//   path_seed = splitmix64(s0 + 0x9e3779b97f4a7c15 * (index + 1))
// where splitmix64(x) means: run one step of the generator above with state x
// and take the output. Results are therefore independent of which worker
// happens to run a path.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag,
                                 std::uint64_t index) {
    std::uint64_t t = stream_tag;
    std::uint64_t m = master ^ splitmix64(t);
    std::uint64_t s = splitmix64(m) + 0x9e3779b97f4a7c15ULL * (index + 1);
    return splitmix64(s);
}

// xoshiro256** 1.0 (Blackman & Vigna). Self-contained so simulated streams do
// not depend on the standard library's unspecified distribution algorithms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1), both endpoints excluded, so log(u) is finite and
    // exponential waits are strictly positive.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Box-Muller; the spare value is cached, so draw order is reproducible.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qhl
