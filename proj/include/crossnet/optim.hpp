#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crossnet/model.hpp"

namespace crossnet {

/// Adam moment buffers, one pair per parameter, aligned with the params list.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t t = 0;
    std::vector<Matrix> m, v;

    explicit AdamState(const std::vector<Param*>& params);
};

/// Scales every gradient by max_norm/||g|| when the joint L2 norm across all
/// parameters exceeds max_norm. Returns the pre-clip norm.
double clip_global_norm(const std::vector<Param*>& params, double max_norm);

void adam_apply(AdamState& state, const std::vector<Param*>& params, double lr);

/// shadow <- decay * shadow + (1 - decay) * params
void ema_update(std::vector<Matrix>& shadow, const std::vector<Param*>& params, double decay);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 512;
    std::size_t steps = 1000;
    double clip_norm = 10.0;
    double ema_decay = 0.9999;
    double lambda = 0.0;
    std::uint64_t seed = 1;
    std::size_t eval_every = 1000;

    void validate() const;
};

struct EvalRecord {
    std::size_t step = 0;
    double train_loss = 0.0;
    double eval_loss = 0.0;    // EMA weights
    double eval_metric = 0.0;  // rmse (regression) or logloss (binary), EMA weights
    double eval_loss_raw = 0.0;
    double eval_metric_raw = 0.0;
    double seconds = 0.0;  // wall clock since training started
};

struct TrainHistory {
    std::vector<EvalRecord> records;

    const EvalRecord& final_record() const {
        if (records.empty()) throw std::logic_error("empty history");
        return records.back();
    }
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(std::size_t step, double loss_value);
    std::size_t step;
};

/// In-memory dataset: dense rows, or sparse examples for embedding models.
struct Dataset {
    Matrix x;
    std::vector<SparseExample> examples;
    Vector labels;

    bool sparse() const { return !examples.empty(); }
    std::size_t size() const { return labels.size(); }
    Batch gather(const std::vector<std::size_t>& idx) const;
    Batch all() const;
};

/// Mini-batch training: per-epoch seeded shuffle, forward/backward, global
/// clip, Adam, EMA. Evaluates on `eval` every eval_every steps (and at the
/// final step) with the EMA shadow weights. When load_ema is true the
/// model is left holding the shadow weights, matching what evaluation saw.
TrainHistory train(Model& model, const Dataset& train_data, const Dataset& eval_data, const TrainConfig& config,
                   bool load_ema = true);

}  // namespace crossnet
