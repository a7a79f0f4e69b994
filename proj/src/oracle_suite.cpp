#include "crossnet/oracle_suite.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "crossnet/polyoracle.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

namespace {

CrossNetVariant random_variant(Rng& rng, std::size_t d, std::size_t depth, bool bias, bool residual) {
    CrossNetVariant v;
    v.use_bias = bias;
    v.use_residual = residual;
    for (std::size_t layer = 0; layer < depth; ++layer) {
        Matrix w(d, d);
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1.0, 1.0);
        v.weights.push_back(std::move(w));
        if (bias) v.biases.push_back(sample_uniform(rng, -1.0, 1.0, d));
    }
    return v;
}

void enumerate_alphas(std::size_t d, int max_order, std::vector<std::vector<int>>& out) {
    std::vector<int> alpha(d, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
        if (pos == d) {
            out.push_back(alpha);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            alpha[pos] = k;
            rec(pos + 1, remaining - k);
        }
        alpha[pos] = 0;
    };
    // All alpha with |alpha| <= max_order; callers filter by total order.
    rec(0, max_order);
}

}  // namespace

OracleSuiteSummary run_oracle_suite(std::uint64_t seed) {
    OracleSuiteSummary summary;
    Rng root(seed);

    auto record = [&](const std::string& name, bool ok, double worst, std::size_t checks) {
        std::ostringstream line;
        line << (ok ? "ok  " : "FAIL") << " " << name << "  checks=" << checks << "  worst=" << worst;
        summary.lines.push_back(line.str());
        summary.checks_run += checks;
        if (!ok) summary.passed = false;
    };

    // (a) symbolic expansion equals the numeric forward pass at random
    // points, for every bias/residual combination.
    {
        double worst = 0.0;
        std::size_t checks = 0;
        bool ok = true;
        for (const bool bias : {false, true}) {
            for (const bool residual : {false, true}) {
                for (std::size_t d = 1; d <= 4; ++d) {
                    for (std::size_t depth = 1; depth <= 3; ++depth) {
                        Rng rng = root.split();
                        const CrossNetVariant v = random_variant(rng, d, depth, bias, residual);
                        const CrossNetExpansion expansion = expand_crossnet(v);
                        for (int pt = 0; pt < 50; ++pt) {
                            const Vector x = sample_uniform(rng, -1.0, 1.0, d);
                            const Vector fwd = v.forward(x);
                            double sum_fwd = 0.0;
                            for (std::size_t i = 0; i < d; ++i) {
                                const double diff = std::abs(expansion.coords[i].evaluate(x) - fwd[i]);
                                worst = std::max(worst, diff);
                                if (diff >= 1e-10) ok = false;
                                sum_fwd += fwd[i];
                                ++checks;
                            }
                            const double sum_diff = std::abs(expansion.sum.evaluate(x) - sum_fwd);
                            worst = std::max(worst, sum_diff);
                            if (sum_diff >= 1e-10) ok = false;
                        }
                    }
                }
            }
        }
        record("expansion_vs_forward", ok, worst, checks);
    }

    // (b) closed-form coefficients match the expansion of 1^T x^l for the
    // no-bias with-residual variant, all admissible multi-indices.
    {
        double worst = 0.0;
        std::size_t checks = 0;
        bool ok = true;
        for (std::size_t d = 1; d <= 3; ++d) {
            for (std::size_t depth = 1; depth <= 3; ++depth) {
                Rng rng = root.split();
                const CrossNetVariant v = random_variant(rng, d, depth, false, true);
                const CrossNetExpansion expansion = expand_crossnet(v);
                std::vector<std::vector<int>> alphas;
                enumerate_alphas(d, static_cast<int>(depth) + 1, alphas);
                for (const auto& alpha : alphas) {
                    int order = 0;
                    for (const int a : alpha) order += a;
                    if (order < 2) continue;
                    const double formula = theorem1_coefficient(alpha, v.weights);
                    const double expanded = expansion.sum.coefficient(alpha);
                    const double diff = std::abs(formula - expanded);
                    worst = std::max(worst, diff);
                    if (diff >= 1e-10) ok = false;
                    ++checks;
                }
            }
        }
        record("coefficient_formula", ok, worst, checks);
    }

    // (c) the feature-wise enumeration rebuilds each coordinate block of the
    // forward pass (no-bias with-residual variant).
    {
        double worst = 0.0;
        std::size_t checks = 0;
        bool ok = true;
        for (std::size_t k = 1; k <= 3; ++k) {
            for (std::size_t depth = 1; depth <= 3; ++depth) {
                Rng rng = root.split();
                std::vector<std::size_t> sizes;
                for (std::size_t f = 0; f < k; ++f) sizes.push_back(1 + rng.below(2));
                const FeaturePartition partition(sizes);
                const std::size_t d = partition.total_dim();
                const CrossNetVariant v = random_variant(rng, d, depth, false, true);
                const Vector x = sample_uniform(rng, -1.0, 1.0, d);
                const Vector fwd = v.forward(x);
                for (std::size_t f = 0; f < k; ++f) {
                    Vector rebuilt(partition.sizes[f], 0.0);
                    const std::size_t off = partition.offset(f);
                    for (std::size_t e = 0; e < rebuilt.size(); ++e) rebuilt[e] = x[off + e];
                    for (const auto& [I, J] : enumerate_interactions(k, depth, f)) {
                        const Vector g = featurewise_interaction(I, J, x, v.weights, partition);
                        for (std::size_t e = 0; e < rebuilt.size(); ++e) rebuilt[e] += g[e];
                    }
                    for (std::size_t e = 0; e < rebuilt.size(); ++e) {
                        const double diff = std::abs(rebuilt[e] - fwd[off + e]);
                        worst = std::max(worst, diff);
                        if (diff >= 1e-10) ok = false;
                        ++checks;
                    }
                }
            }
        }
        record("featurewise_enumeration", ok, worst, checks);
    }

    // (d) degree bounds: at most depth+1 everywhere, attained generically;
    // the bias+residual variant carries every order 1..depth+1, and the
    // bare product variant at depth l-1 carries order l only.
    {
        std::size_t checks = 0;
        bool ok = true;
        for (const bool bias : {false, true}) {
            for (const bool residual : {false, true}) {
                for (std::size_t depth = 1; depth <= 3; ++depth) {
                    for (int trial = 0; trial < 10; ++trial) {
                        Rng rng = root.split();
                        const CrossNetVariant v = random_variant(rng, 3, depth, bias, residual);
                        const CrossNetExpansion expansion = expand_crossnet(v);
                        const int deg = expansion.sum.max_degree();
                        ++checks;
                        if (deg > static_cast<int>(depth) + 1) ok = false;
                        if (deg != static_cast<int>(depth) + 1) ok = false;  // generic weights attain the bound
                        if (bias && residual) {
                            std::vector<bool> seen(depth + 2, false);
                            for (const auto& [alpha, c] : expansion.sum.terms()) {
                                int order = 0;
                                for (const int a : alpha) order += a;
                                seen[static_cast<std::size_t>(order)] = true;
                            }
                            for (std::size_t order = 1; order <= depth + 1; ++order)
                                if (!seen[order]) ok = false;
                        }
                        if (!bias && !residual) {
                            for (const auto& [alpha, c] : expansion.sum.terms()) {
                                int order = 0;
                                for (const int a : alpha) order += a;
                                if (order != static_cast<int>(depth) + 1) ok = false;
                            }
                        }
                    }
                }
            }
        }
        record("degree_bounds", ok, 0.0, checks);
    }

    return summary;
}

}  // namespace crossnet
