#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crossnet {

/// Result of the symbolic verification sweep behind the `oracle` command:
/// expansion-vs-numeric agreement for every bias/residual flag combination,
/// the closed-form coefficient check, the feature-wise enumeration
/// reconstruction, and the degree bounds.
struct OracleSuiteSummary {
    bool passed = true;
    std::vector<std::string> lines;
    std::size_t checks_run = 0;
};

OracleSuiteSummary run_oracle_suite(std::uint64_t seed);

}  // namespace crossnet
