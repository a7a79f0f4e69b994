#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossnet/model.hpp"
#include "crossnet/optim.hpp"
#include "crossnet/partition.hpp"

namespace crossnet {

enum class ExperimentKind { synth_fit, train, gradcheck, oracle, analyze };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

enum class ColumnKind { categorical, multivalent, dense, label };

std::string to_string(ColumnKind k);
ColumnKind column_kind_from_string(const std::string& s);

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::dense;
    bool open_vocab = false;      // out-of-vocab maps to reserved index 0
    bool log_transform = false;   // dense: x -> log(x + log_shift)
    double log_shift = 1.0;
    std::size_t declared_vocab = 0;  // 0 = fitted from data
};

struct TabularSchema {
    std::vector<ColumnSpec> columns;

    void validate() const;  // exactly one label, at least one feature
    const ColumnSpec* find(const std::string& name) const;
};

/// Flat key=value experiment description. Unknown keys are rejected;
/// serialize() emits every field so that parse(serialize(x)) == x.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::synth_fit;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::size_t repeats = 1;

    // dataset
    std::string dataset = "f1";  // f1|f2|f3|homogeneous3|homogeneous4|combined|csv
    std::uint64_t data_seed = 7;
    std::size_t train_samples = 0;  // 0 = dataset default
    std::size_t test_samples = 0;
    double split_fraction = 0.8;  // csv train share
    std::string csv_path;
    TabularSchema schema;  // column.<name> entries
    Task task = Task::regression_mse;

    // architecture
    StructureKind structure = StructureKind::cross_only;
    CrossKind cross_kind = CrossKind::full;
    std::size_t cross_layers = 1;
    std::size_t cross_rank = 0;
    std::size_t cross_experts = 1;
    GateMode cross_gate = GateMode::softmax;
    bool cross_with_c = false;
    Activation cross_activation = Activation::tanh;
    bool cross_bias = true;
    bool cross_residual = true;
    std::vector<std::size_t> deep_sizes;
    Activation deep_activation = Activation::relu;
    bool head_bias = false;
    std::size_t embed_dim = 0;  // 0 = 6 * vocab^(1/4) rule

    // training
    double learning_rate = 1e-3;
    std::size_t batch_size = 512;
    std::size_t train_steps = 1000;
    double clip_norm = 10.0;
    double ema_decay = 0.9999;
    double l2_lambda = 0.0;
    std::size_t eval_every = 1000;

    // analyze
    std::string checkpoint;
    std::string feature_blocks;  // "name:size,name:size"
    double rank_tolerance = 0.01;

    void validate() const;
    TrainConfig train_config(std::uint64_t run_seed) const;
    std::vector<CrossLayerSpec> cross_layer_specs() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& config, const std::string& line);
std::string serialize_config(const ExperimentConfig& config);

std::vector<std::size_t> parse_size_list(const std::string& s);
FeaturePartition parse_feature_blocks(const std::string& s, std::vector<std::string>* names);

}  // namespace crossnet
