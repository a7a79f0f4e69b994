#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace crossnet {

/// Contiguous split of coordinates 1..d into k feature blocks.
struct FeaturePartition {
    std::vector<std::size_t> sizes;

    FeaturePartition() = default;
    explicit FeaturePartition(std::vector<std::size_t> block_sizes) : sizes(std::move(block_sizes)) {
        for (const std::size_t s : sizes)
            if (s == 0) throw std::invalid_argument("feature partition: zero-sized block");
    }

    std::size_t feature_count() const { return sizes.size(); }
    std::size_t total_dim() const { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }
    std::size_t offset(std::size_t feature) const {
        if (feature >= sizes.size()) throw std::out_of_range("feature partition: feature index out of range");
        std::size_t off = 0;
        for (std::size_t i = 0; i < feature; ++i) off += sizes[i];
        return off;
    }
};

}  // namespace crossnet
