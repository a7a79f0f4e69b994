#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crossnet/activation.hpp"
#include "crossnet/linalg.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

/// A learned tensor plus its gradient accumulator. Vector-shaped parameters
/// (biases, gates, the logit head) are stored as 1xN matrices so the
/// optimizer can treat everything uniformly.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    bool regularized = false;  // participates in the L2 term

    Param() = default;
    Param(std::string n, std::size_t rows, std::size_t cols, bool reg = false)
        : name(std::move(n)), value(rows, cols), grad(rows, cols), regularized(reg) {}

    std::size_t size() const { return value.size(); }
    void zero_grad() { grad.fill(0.0); }
};

/// He-normal init: truncated normal with std sqrt(2/fan_in), rejected beyond
/// two standard deviations.
void he_normal_init(Matrix& w, std::size_t fan_in, Rng& rng);

// Batches are row-major: row r of a BxD matrix is example r.

/// Intermediates of one low-rank projection x0 (.) (U g(C g(V^T x)) + b).
/// Shared between the low-rank layer and each mixture expert so the two
/// compute through identical code (the K=1 constant-gate mixture must
/// reproduce the plain low-rank layer exactly).
struct LowRankCoreCache {
    Matrix t;     // Xl V           (B x r)
    Matrix a1;    // g(t)           (with C only)
    Matrix s;     // a1 C^T         (with C only)
    Matrix proj;  // back-projection through U
    Matrix pre;   // proj + b
    Matrix out;   // x0 (.) pre
};

// ---------------------------------------------------------------------------
// Cross layer: x_{l+1} = x0 (.) (W x_l + b) + x_l
// ---------------------------------------------------------------------------
struct CrossLayer {
    std::size_t dim = 0;
    bool use_bias = true;
    bool use_residual = true;
    Param W;  // d x d
    Param b;  // 1 x d

    struct Cache {
        Matrix x0, xl, pre;  // pre = Xl W^T (+ b)
    };

    CrossLayer() = default;
    explicit CrossLayer(std::size_t d, bool bias = true, bool residual = true);

    Matrix forward(const Matrix& x0, const Matrix& xl, Cache* cache) const;
    // Accumulates into W.grad / b.grad; returns (d_x0, d_xl).
    std::pair<Matrix, Matrix> backward(const Cache& cache, const Matrix& d_out);

    void init_params(Rng& rng);
    std::size_t param_count() const;
    std::vector<Param*> params();
};

// ---------------------------------------------------------------------------
// Rank-1 structured cross layer, W = 1 w^T: the first-generation cross
// network expressed in the same residual form.
// ---------------------------------------------------------------------------
struct Dcnv1Layer {
    std::size_t dim = 0;
    Param w;  // 1 x d
    Param b;  // 1 x d

    struct Cache {
        Matrix x0, xl, pre;  // pre[r, j] = (w . xl_r) + b_j
    };

    Dcnv1Layer() = default;
    explicit Dcnv1Layer(std::size_t d);

    Matrix forward(const Matrix& x0, const Matrix& xl, Cache* cache) const;
    std::pair<Matrix, Matrix> backward(const Cache& cache, const Matrix& d_out);

    void init_params(Rng& rng);
    std::size_t param_count() const;
    std::vector<Param*> params();
};

// ---------------------------------------------------------------------------
// Low-rank cross layer: x_{l+1} = x0 (.) (U (V^T x_l) + b) + x_l
// ---------------------------------------------------------------------------
struct LowRankCrossLayer {
    std::size_t dim = 0;
    std::size_t rank = 0;
    Param U;  // d x r
    Param V;  // d x r
    Param b;  // 1 x d

    struct Cache {
        Matrix x0, xl;
        LowRankCoreCache core;
    };

    LowRankCrossLayer() = default;
    LowRankCrossLayer(std::size_t d, std::size_t r);

    Matrix forward(const Matrix& x0, const Matrix& xl, Cache* cache) const;
    std::pair<Matrix, Matrix> backward(const Cache& cache, const Matrix& d_out);

    void init_params(Rng& rng);
    std::size_t param_count() const;
    std::vector<Param*> params();
};

// ---------------------------------------------------------------------------
// Mixture of low-rank experts combined by an input-dependent gate.
// ---------------------------------------------------------------------------
enum class GateMode { softmax, sigmoid, constant_one };

std::string to_string(GateMode m);
GateMode gate_mode_from_string(const std::string& s);

struct MixtureCrossLayer {
    struct Expert {
        std::size_t rank = 0;
        bool has_c = false;
        Param U;  // d x r
        Param V;  // d x r
        Param C;  // r x r, inner refinement (optional)
        Param b;  // 1 x d
    };

    std::size_t dim = 0;
    std::vector<Expert> experts;
    Param gate;  // K x d, one linear functional per expert
    GateMode gate_mode = GateMode::softmax;
    Activation expert_activation = Activation::tanh;

    struct Cache {
        Matrix x0, xl;
        Matrix logits;  // B x K
        Matrix gates;   // B x K
        std::vector<LowRankCoreCache> expert;
    };

    MixtureCrossLayer() = default;
    MixtureCrossLayer(std::size_t d, std::size_t k, std::size_t r, GateMode mode,
                      bool with_c = false, Activation g = Activation::tanh);
    // Per-expert ranks; experts share the gate mode and activation.
    MixtureCrossLayer(std::size_t d, const std::vector<std::size_t>& ranks, GateMode mode,
                      bool with_c = false, Activation g = Activation::tanh);

    Matrix forward(const Matrix& x0, const Matrix& xl, Cache* cache) const;
    std::pair<Matrix, Matrix> backward(const Cache& cache, const Matrix& d_out);

    void init_params(Rng& rng);
    std::size_t param_count() const;
    std::vector<Param*> params();
};

// ---------------------------------------------------------------------------
// Dense (deep) layer: h_{l+1} = f(W h_l + b)
// ---------------------------------------------------------------------------
struct DenseLayer {
    std::size_t in_dim = 0, out_dim = 0;
    Activation activation = Activation::relu;
    Param W;  // out x in
    Param b;  // 1 x out

    struct Cache {
        Matrix h, z;  // input and pre-activation
    };

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, Activation f = Activation::relu);

    Matrix forward(const Matrix& h, Cache* cache) const;
    Matrix backward(const Cache& cache, const Matrix& d_out);  // returns d_h

    void init_params(Rng& rng);
    std::size_t param_count() const;
    std::vector<Param*> params();
};

// ---------------------------------------------------------------------------
// Embedding layer: concatenated per-feature lookups plus passthrough dense
// features. Multivalent features contribute the mean of their columns.
// ---------------------------------------------------------------------------
struct SparseExample {
    std::vector<std::vector<std::uint32_t>> indices;  // one list per categorical feature
    Vector dense;
};

struct EmbeddingFeatureSpec {
    std::string name;
    std::size_t vocab = 0;
    std::size_t embed_dim = 0;
};

struct EmbeddingLayer {
    std::vector<EmbeddingFeatureSpec> features;
    std::size_t dense_count = 0;
    std::vector<Param> tables;  // e_i x v_i, column j is the vector for index j

    EmbeddingLayer() = default;
    EmbeddingLayer(std::vector<EmbeddingFeatureSpec> specs, std::size_t dense);

    std::size_t output_dim() const;

    Vector forward(const SparseExample& ex) const;
    Matrix forward_batch(const std::vector<SparseExample>& batch) const;
    // Scatters d_x0 into table grads; multivalent lookups split the upstream
    // gradient evenly across their m columns.
    void backward_batch(const std::vector<SparseExample>& batch, const Matrix& d_x0);

    void init_params(Rng& rng);
    std::size_t param_count() const;
    std::vector<Param*> params();
};

// ---------------------------------------------------------------------------
// Single-example convenience wrappers (one-row batches).
// ---------------------------------------------------------------------------
Vector cross_forward(const CrossLayer& layer, const Vector& x0, const Vector& xl);
Vector dcnv1_forward(const Dcnv1Layer& layer, const Vector& x0, const Vector& xl);
Vector lowrank_cross_forward(const LowRankCrossLayer& layer, const Vector& x0, const Vector& xl);
Vector mixture_cross_forward(const MixtureCrossLayer& layer, const Vector& x0, const Vector& xl);
Vector dense_forward(const DenseLayer& layer, const Vector& h);

Matrix row_matrix(const Vector& v);

}  // namespace crossnet
