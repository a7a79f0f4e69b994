#pragma once

#include <string>
#include <vector>

#include "crossnet/linalg.hpp"
#include "crossnet/partition.hpp"

namespace crossnet {

/// Singular values normalized by the largest one, descending. `degenerate`
/// flags an all-zero matrix instead of propagating NaNs.
struct SpectrumReport {
    Vector normalized;
    double sigma1 = 0.0;
    bool degenerate = false;
};

SpectrumReport spectrum(const Matrix& w);

/// Numerical rank at relative tolerance T: the number of singular values
/// >= T * sigma1 (the retained-rank reading of the argmin definition).
/// Requires 0 < T < 1.
std::size_t numerical_rank(const SpectrumReport& report, double tolerance);

/// k x k grid of Frobenius norms of the W blocks induced by a feature
/// partition.
struct BlockNormMap {
    std::vector<std::string> feature_names;
    Matrix norms;
};

BlockNormMap block_norms(const Matrix& w, const FeaturePartition& partition,
                         std::vector<std::string> feature_names = {});

// CSV exports. Spectrum: "index,sigma_normalized"; blocks:
// "feature_i,feature_j,frobenius_norm". Deterministic row order.
void write_spectrum_csv(const SpectrumReport& report, const std::string& path);
void write_block_norm_csv(const BlockNormMap& map, const std::string& path);

SpectrumReport read_spectrum_csv(const std::string& path);
BlockNormMap read_block_norm_csv(const std::string& path);

}  // namespace crossnet
