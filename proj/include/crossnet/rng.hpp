#pragma once

#include <cstdint>
#include <cstddef>

#include "crossnet/linalg.hpp"

namespace crossnet {

/// xoshiro256** seeded through splitmix64. Streams are reproducible for a
/// fixed seed within one build; no bit-exact guarantee is made across
/// implementations, so tests against this generator are statistical.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double next_double();
    double uniform(double lo, double hi);
    /// Box-Muller; draws two normals and caches the spare.
    double gaussian(double mean, double stddev);
    /// Rejection-sampled N(0, stddev^2) confined to [-clip*stddev, clip*stddev].
    double truncated_gaussian(double stddev, double clip = 2.0);
    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Independent stream derived from this one (seed-splitting).
    Rng split();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

Vector sample_uniform(Rng& rng, double lo, double hi, std::size_t n);
Vector sample_gaussian(Rng& rng, double mean, double stddev, std::size_t n);

}  // namespace crossnet
