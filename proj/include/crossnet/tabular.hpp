#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "crossnet/config.hpp"
#include "crossnet/optim.hpp"

namespace crossnet {

/// Token -> dense index mapping in first-occurrence order. Open vocabs
/// reserve index 0 for out-of-vocab tokens, so fitted tokens start at 1.
struct Vocab {
    std::string column;
    bool open = false;
    std::vector<std::string> tokens;
    std::unordered_map<std::string, std::uint32_t> index;

    std::size_t size() const { return tokens.size() + (open ? 1 : 0); }
};

struct TabularData {
    Dataset dataset;
    std::vector<Vocab> vocabs;                    // one per categorical/multivalent column
    std::vector<std::string> categorical_names;   // schema order
    std::vector<std::string> dense_names;
    Task task = Task::regression_mse;
};

/// Loads a comma-separated file with a mandatory header against the schema,
/// fitting vocabularies in first-occurrence order. Multivalent cells split
/// on '|'; dense columns may be log-transformed. `fitted` switches to apply
/// mode: tokens missing from the vocab map to the reserved index 0 on open
/// columns and raise otherwise.
TabularData load_tabular_csv(const std::string& path, const TabularSchema& schema, Task task,
                             const std::vector<Vocab>* fitted = nullptr);

/// Rule-of-thumb embedding width: round(6 * vocab^(1/4)), at least 1.
std::size_t embed_size_rule(std::size_t vocab_size);

}  // namespace crossnet
