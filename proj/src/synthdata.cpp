#include "crossnet/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace crossnet {

int MonomialTerm::order() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

namespace {

MonomialTerm pair_term(std::size_t dim, std::size_t i, std::size_t j, double w) {
    MonomialTerm t;
    t.exponents.assign(dim, 0);
    t.exponents[i] += 1;
    t.exponents[j] += 1;
    t.weight = w;
    return t;
}

double n_choose_k_capped(std::size_t n, std::size_t k, double cap) {
    double acc = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (acc > cap) return cap + 1.0;
    }
    return acc;
}

}  // namespace

PolynomialSpec make_f1() {
    PolynomialSpec s;
    s.dim = 4;
    s.name = "f1";
    s.terms.push_back(pair_term(4, 0, 0, 1.0));  // x1^2
    s.terms.push_back(pair_term(4, 0, 1, 1.0));  // x1 x2
    s.terms.push_back(pair_term(4, 2, 0, 1.0));  // x3 x1
    s.terms.push_back(pair_term(4, 3, 0, 1.0));  // x4 x1
    return s;
}

PolynomialSpec make_f2() {
    PolynomialSpec s;
    s.dim = 3;
    s.name = "f2";
    s.terms.push_back(pair_term(3, 0, 0, 1.0));  // x1^2
    s.terms.push_back(pair_term(3, 0, 1, 0.1));  // 0.1 x1 x2
    s.terms.push_back(pair_term(3, 1, 2, 1.0));  // x2 x3
    s.terms.push_back(pair_term(3, 2, 2, 0.1));  // 0.1 x3^2
    return s;
}

PolynomialSpec make_f3(std::uint64_t seed) {
    PolynomialSpec s;
    s.dim = 100;
    s.name = "f3";
    Rng rng(seed);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (chosen.size() < 100) {
        std::size_t i = rng.below(100), j = rng.below(100);
        if (i > j) std::swap(i, j);
        chosen.insert({i, j});
    }
    for (const auto& [i, j] : chosen) s.terms.push_back(pair_term(100, i, j, rng.uniform(-1.0, 1.0)));
    return s;
}

PolynomialSpec make_homogeneous(int order, std::size_t n_terms, std::size_t dim, std::uint64_t seed) {
    if (order < 2) throw std::invalid_argument("make_homogeneous: order must be >= 2");
    // Monomials of this order number C(dim + order - 1, order).
    if (n_choose_k_capped(dim + order - 1, static_cast<std::size_t>(order), 1e18) <
        static_cast<double>(n_terms))
        throw std::invalid_argument("make_homogeneous: n_terms exceeds available monomials");

    PolynomialSpec s;
    s.dim = dim;
    s.name = "homogeneous" + std::to_string(order);
    Rng rng(seed);
    std::set<std::vector<int>> chosen;
    while (chosen.size() < n_terms) {
        std::vector<int> alpha(dim, 0);
        for (int k = 0; k < order; ++k) alpha[rng.below(dim)] += 1;
        chosen.insert(std::move(alpha));
    }
    for (const auto& alpha : chosen) {
        MonomialTerm t;
        t.exponents = alpha;
        t.weight = rng.uniform(-1.0, 1.0);
        s.terms.push_back(std::move(t));
    }
    return s;
}

PolynomialSpec make_combined(std::uint64_t seed) {
    const std::size_t dim = 50;
    Rng rng(seed);
    PolynomialSpec s;
    s.dim = dim;
    s.name = "combined";
    s.linear = sample_uniform(rng, -1.0, 1.0, dim);

    const std::pair<int, std::size_t> blocks[] = {{2, 20}, {3, 10}, {4, 5}};
    std::set<std::vector<int>> chosen;
    for (const auto& [order, count] : blocks) {
        std::size_t added = 0;
        while (added < count) {
            std::vector<int> alpha(dim, 0);
            for (int k = 0; k < order; ++k) alpha[rng.below(dim)] += 1;
            if (chosen.insert(alpha).second) {
                MonomialTerm t;
                t.exponents = std::move(alpha);
                t.weight = rng.uniform(-1.0, 1.0);
                s.terms.push_back(std::move(t));
                ++added;
            }
        }
    }

    SineTerm sine;
    sine.amplitude = 0.1;
    sine.frequency = 2.0;
    sine.phase = 0.1;
    sine.direction = sample_uniform(rng, -1.0, 1.0, dim);
    s.sine = sine;
    s.noise_std = 0.01;
    return s;
}

double evaluate(const PolynomialSpec& spec, const Vector& x) {
    if (x.size() != spec.dim)
        throw std::invalid_argument("evaluate: input length " + std::to_string(x.size()) + " != dim " +
                                    std::to_string(spec.dim));
    double acc = 0.0;
    if (!spec.linear.empty()) acc += dot(spec.linear, x);
    for (const auto& term : spec.terms) {
        double prod = term.weight;
        for (std::size_t i = 0; i < spec.dim; ++i) {
            for (int k = 0; k < term.exponents[i]; ++k) prod *= x[i];
        }
        acc += prod;
    }
    if (spec.sine.has_value())
        acc += spec.sine->amplitude * std::sin(spec.sine->frequency * dot(x, spec.sine->direction) + spec.sine->phase);
    return acc;
}

std::pair<SyntheticDataset, SyntheticDataset> sample_dataset(const PolynomialSpec& spec, std::size_t n,
                                                             std::uint64_t seed, double split) {
    if (n < 2) throw std::invalid_argument("sample_dataset: need n >= 2");
    if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("sample_dataset: split must be in (0, 1)");

    Rng rng(seed);
    const std::size_t n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * split));
    if (n_train == 0 || n_train == n) throw std::invalid_argument("sample_dataset: degenerate split");

    SyntheticDataset train, test;
    train.seed = test.seed = seed;
    train.inputs = Matrix(n_train, spec.dim);
    train.targets.resize(n_train);
    test.inputs = Matrix(n - n_train, spec.dim);
    test.targets.resize(n - n_train);

    Vector x(spec.dim);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        double y = evaluate(spec, x);
        if (spec.noise_std > 0.0) y += rng.gaussian(0.0, spec.noise_std);
        const bool in_train = r < n_train;
        Matrix& m = in_train ? train.inputs : test.inputs;
        const std::size_t row = in_train ? r : r - n_train;
        for (std::size_t c = 0; c < spec.dim; ++c) m(row, c) = x[c];
        (in_train ? train.targets : test.targets)[row] = y;
    }
    return {train, test};
}

}  // namespace crossnet
