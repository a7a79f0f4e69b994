#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossnet/linalg.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

/// One monomial w * x1^a1 ... xd^ad; exponents has one entry per input
/// coordinate and |alpha| >= 1.
struct MonomialTerm {
    std::vector<int> exponents;
    double weight = 0.0;

    int order() const;
};

struct SineTerm {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    Vector direction;  // w_s
};

/// Ground-truth function: optional linear part + sparse polynomial +
/// optional sine perturbation; observations add N(0, noise_std^2).
struct PolynomialSpec {
    std::size_t dim = 0;
    std::vector<MonomialTerm> terms;
    Vector linear;  // empty means absent
    std::optional<SineTerm> sine;
    double noise_std = 0.0;
    std::string name;
};

// The three fixed quadratic targets of increasing difficulty.
PolynomialSpec make_f1();
PolynomialSpec make_f2();
// d=100; 100 distinct pairs (i <= j) sampled without replacement,
// weights uniform in [-1, 1].
PolynomialSpec make_f3(std::uint64_t seed);

/// n_terms distinct monomials, all of the given order, over d inputs;
/// weights uniform in [-1, 1].
PolynomialSpec make_homogeneous(int order, std::size_t n_terms, std::size_t dim, std::uint64_t seed);

/// Combined-order target over d=50: linear part, 20/10/5 random terms of
/// orders 2/3/4, a 0.1 sin(2 x.w_s + 0.1) perturbation, and 0.01 noise.
PolynomialSpec make_combined(std::uint64_t seed);

/// Noiseless value of the spec at x.
double evaluate(const PolynomialSpec& spec, const Vector& x);

struct SyntheticDataset {
    Matrix inputs;   // n x d, entries in [-1, 1]
    Vector targets;  // evaluate(...) + noise
    std::uint64_t seed = 0;
};

/// Samples n points uniform on [-1,1]^d and splits them deterministically:
/// the first round(n*split) rows become the train set, the rest the test
/// set.
std::pair<SyntheticDataset, SyntheticDataset> sample_dataset(const PolynomialSpec& spec, std::size_t n,
                                                             std::uint64_t seed, double split);

}  // namespace crossnet
