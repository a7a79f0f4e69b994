#include "crossnet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crossnet {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
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

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform: need lo < hi");
    return lo + (hi - lo) * next_double();
}

double Rng::gaussian(double mean, double stddev) {
    if (stddev < 0.0) throw std::invalid_argument("gaussian: need stddev >= 0");
    if (stddev == 0.0) return mean;
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mean + stddev * mag * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::truncated_gaussian(double stddev, double clip) {
    if (stddev == 0.0) return 0.0;
    for (;;) {
        const double v = gaussian(0.0, stddev);
        if (std::abs(v) <= clip * stddev) return v;
    }
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: need n > 0");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

Rng Rng::split() { return Rng(next_u64()); }

Vector sample_uniform(Rng& rng, double lo, double hi, std::size_t n) {
    if (!(lo < hi)) throw std::invalid_argument("sample_uniform: need lo < hi");
    Vector v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

Vector sample_gaussian(Rng& rng, double mean, double stddev, std::size_t n) {
    if (stddev < 0.0) throw std::invalid_argument("sample_gaussian: need stddev >= 0");
    Vector v(n);
    for (auto& x : v) x = rng.gaussian(mean, stddev);
    return v;
}

}  // namespace crossnet
