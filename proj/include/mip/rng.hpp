#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>

namespace mip {

// Counter-based generator (splitmix64 finalizer over key + counter).
// Streams are stateless functions of (key, counter), so child streams can be
// derived per entity (case, user, session) and consumed in any order without
// affecting each other. That keeps simulation output independent of the
// number of worker threads.
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

class RngStream {
public:
    RngStream() : key_(0) {}
    explicit RngStream(uint64_t key) : key_(key) {}

    static RngStream root(uint64_t seed) {
        return RngStream(mix64(seed + kGamma));
    }

    // Independent stream identified by (this stream, tag).
    RngStream child(uint64_t tag) const {
        return RngStream(mix64(key_ ^ mix64(tag + kGamma)));
    }

    uint64_t next_u64() {
        counter_ += 1;
        return mix64(key_ + kGamma * counter_);
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n). Negligible bias for n << 2^64.
    uint64_t uniform_int(uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller, cosine branch only.
    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double mean) {
        return -mean * std::log1p(-uniform());
    }

    double lognormal_median(double median, double sigma) {
        return std::exp(std::log(median) + sigma * normal());
    }

    // Knuth product method; fine for the small means used here.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        double limit = std::exp(-mean);
        int k = 0;
        double prod = uniform();
        while (prod > limit) {
            k += 1;
            prod *= uniform();
        }
        return k;
    }

    // Number of failures before the first success; success probability 1 - p_fail.
    int geometric_failures(double p_fail, int cap = -1) {
        int k = 0;
        while ((cap < 0 || k < cap) && bernoulli(p_fail)) k += 1;
        return k;
    }

    // Index into `probs`; probabilities are assumed to sum to ~1.
    size_t categorical(std::span<const double> probs) {
        double u = uniform();
        double acc = 0.0;
        for (size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

private:
    static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace mip
