#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crossnet/layers.hpp"

namespace crossnet {

enum class StructureKind { stacked, parallel, cross_only, dnn_only };
enum class Task { binary_logloss, regression_mse };
enum class CrossKind { full, lowrank, mixture, dcnv1 };

std::string to_string(StructureKind s);
std::string to_string(Task t);
std::string to_string(CrossKind k);
StructureKind structure_from_string(const std::string& s);
Task task_from_string(const std::string& s);
CrossKind cross_kind_from_string(const std::string& s);

struct CrossLayerSpec {
    CrossKind kind = CrossKind::full;
    std::size_t rank = 0;     // lowrank / mixture
    std::size_t experts = 1;  // mixture
    GateMode gate = GateMode::softmax;
    bool with_c = false;
    Activation expert_activation = Activation::tanh;
    bool use_bias = true;      // full kind only
    bool use_residual = true;  // full kind only
};

/// Everything needed to rebuild a model's shape; serialized in checkpoints.
struct ModelSpec {
    StructureKind structure = StructureKind::cross_only;
    Task task = Task::regression_mse;
    std::size_t input_dim = 0;  // d: embedding output dim, or raw feature dim
    std::vector<CrossLayerSpec> cross_layers;
    std::vector<std::size_t> deep_sizes;
    Activation deep_activation = Activation::relu;
    bool head_bias = false;

    bool has_embedding = false;
    std::vector<EmbeddingFeatureSpec> embed_features;
    std::size_t dense_features = 0;

    void validate() const;
    std::size_t final_dim() const;
};

/// One training batch. Models with an embedding layer consume `examples`;
/// raw-input models consume rows of `x`. Binary labels must be 0/1.
struct Batch {
    Matrix x;
    std::vector<SparseExample> examples;
    Vector labels;

    std::size_t size() const { return labels.size(); }
};

class Model {
public:
    explicit Model(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }
    void init_params(Rng& rng);
    std::vector<Param*> params();
    std::vector<const Param*> params() const;
    std::size_t param_count() const;
    void zero_grad();

    using CrossVariant = std::variant<CrossLayer, Dcnv1Layer, LowRankCrossLayer, MixtureCrossLayer>;
    using CrossCacheVariant =
        std::variant<CrossLayer::Cache, Dcnv1Layer::Cache, LowRankCrossLayer::Cache, MixtureCrossLayer::Cache>;

    struct ForwardCache {
        Matrix x0;
        std::vector<CrossCacheVariant> cross;
        std::vector<DenseLayer::Cache> deep;
        Matrix final_out;  // B x final_dim
        Vector logits;
        Vector predictions;
    };

    /// Predictions: sigmoid of the logit for the binary task, the raw logit
    /// for regression.
    Vector forward(const Batch& batch, ForwardCache* cache) const;

    /// Data loss plus lambda * sum of squared Frobenius norms of the
    /// regularized weight matrices. Predictions are clamped to
    /// [1e-12, 1 - 1e-12] inside the log only.
    double loss(const Vector& predictions, const Vector& labels, double lambda) const;

    /// Chain rule through head, deep stack, cross stack and embedding;
    /// accumulates into parameter grads and adds 2*lambda*W to each
    /// regularized weight.
    void backward(const Batch& batch, const ForwardCache& cache, double lambda);

    double evaluate_loss(const Batch& batch, double lambda) const;

    std::vector<CrossVariant>& cross_stack() { return cross_; }
    const std::vector<CrossVariant>& cross_stack() const { return cross_; }
    std::vector<DenseLayer>& deep_stack() { return deep_; }
    EmbeddingLayer* embedding() { return spec_.has_embedding ? &embedding_ : nullptr; }
    const EmbeddingLayer* embedding() const { return spec_.has_embedding ? &embedding_ : nullptr; }
    Param& head() { return w_logit_; }
    const Param& head() const { return w_logit_; }

private:
    Matrix input_matrix(const Batch& batch) const;

    ModelSpec spec_;
    EmbeddingLayer embedding_;
    std::vector<CrossVariant> cross_;
    std::vector<DenseLayer> deep_;
    Param w_logit_;    // 1 x final_dim
    Param head_bias_;  // 1 x 1, only when spec.head_bias
};

double rmse(const Vector& predictions, const Vector& labels);
double sigmoid(double z);

}  // namespace crossnet
