#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sdt {

// splitmix64 step; used to derive independent per-replicate seeds from a
// master seed so that parallel simulation schedules stay deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on (0, 1); strictly positive so log() is always safe.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // Box-Muller, cosine branch only (two uniforms per variate, no cached
    // state, so interleaved draws stay reproducible).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // CDF inversion; fine for the modest rates used here.
    long long poisson(double rate) {
        const double u = uniform();
        double p = std::exp(-rate);
        double cum = p;
        long long k = 0;
        while (u > cum && k < 100000) {
            ++k;
            p *= rate / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace sdt
