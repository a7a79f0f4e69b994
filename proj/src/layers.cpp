#include "crossnet/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace crossnet {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

// m[r, :] += b[0, :]
void add_row_bias(Matrix& m, const Matrix& b) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* mr = m.row(r);
        const double* br = b.row(0);
        for (std::size_t c = 0; c < m.cols(); ++c) mr[c] += br[c];
    }
}

// dst[0, :] += column sums of src
void colsum_accumulate(const Matrix& src, Matrix& dst) {
    for (std::size_t r = 0; r < src.rows(); ++r) {
        const double* sr = src.row(r);
        double* d = dst.row(0);
        for (std::size_t c = 0; c < src.cols(); ++c) d[c] += sr[c];
    }
}

void hadamard_into(const Matrix& a, const Matrix& b, Matrix& out) {
    out = Matrix(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
}

void apply_activation(Activation f, const Matrix& z, Matrix& out) {
    out = Matrix(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.size(); ++i) out.data()[i] = activate(f, z.data()[i]);
}

// out = d (.) f'(z)
void activation_backward(Activation f, const Matrix& z, const Matrix& d, Matrix& out) {
    out = Matrix(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.size(); ++i) out.data()[i] = d.data()[i] * activate_grad(f, z.data()[i]);
}

// Forward of one low-rank core: out = x0 (.) (U g(C g(V^T xl)) + b), the C
// and g stages skipped when C is absent.
Matrix lowrank_core_forward(const Matrix& x0, const Matrix& xl, const Param& U, const Param& V,
                            const Param* C, const Param& b, Activation g, LowRankCoreCache& cc) {
    matmul_into(xl, V.value, cc.t);  // B x r
    if (C != nullptr) {
        apply_activation(g, cc.t, cc.a1);
        matmul_a_bt_into(cc.a1, C->value, cc.s);
        Matrix a2;
        apply_activation(g, cc.s, a2);
        matmul_a_bt_into(a2, U.value, cc.proj);
    } else {
        matmul_a_bt_into(cc.t, U.value, cc.proj);
    }
    cc.pre = cc.proj;
    add_row_bias(cc.pre, b.value);
    hadamard_into(x0, cc.pre, cc.out);
    return cc.out;
}

// Backward of the core given d_e = dL/d(out). Accumulates parameter grads
// and adds the input contributions into d_x0 / d_xl.
void lowrank_core_backward(const Matrix& d_e, const Matrix& x0, const Matrix& xl, Param& U, Param& V,
                           Param* C, Param& b, Activation g, const LowRankCoreCache& cc,
                           Matrix& d_x0, Matrix& d_xl) {
    Matrix d_pre;
    hadamard_into(d_e, x0, d_pre);
    {
        Matrix d_x0_part;
        hadamard_into(d_e, cc.pre, d_x0_part);
        add_into(d_x0_part, d_x0);
    }
    colsum_accumulate(d_pre, b.grad);

    Matrix d_t;
    if (C != nullptr) {
        Matrix a2;
        apply_activation(g, cc.s, a2);
        matmul_at_b_into(d_pre, a2, U.grad, /*accumulate=*/true);
        Matrix d_a2 = matmul(d_pre, U.value);
        Matrix d_s;
        activation_backward(g, cc.s, d_a2, d_s);
        matmul_at_b_into(d_s, cc.a1, C->grad, /*accumulate=*/true);
        Matrix d_a1 = matmul(d_s, C->value);
        activation_backward(g, cc.t, d_a1, d_t);
    } else {
        matmul_at_b_into(d_pre, cc.t, U.grad, /*accumulate=*/true);
        d_t = matmul(d_pre, U.value);
    }
    matmul_at_b_into(xl, d_t, V.grad, /*accumulate=*/true);
    Matrix d_xl_part;
    matmul_a_bt_into(d_t, V.value, d_xl_part);
    add_into(d_xl_part, d_xl);
}

}  // namespace

void he_normal_init(Matrix& w, std::size_t fan_in, Rng& rng) {
    if (fan_in == 0) throw std::invalid_argument("he_normal_init: fan_in must be positive");
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.truncated_gaussian(stddev, 2.0);
}

Matrix row_matrix(const Vector& v) {
    Matrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
    return m;
}

// ---------------------------------------------------------------------------
// CrossLayer
// ---------------------------------------------------------------------------

CrossLayer::CrossLayer(std::size_t d, bool bias, bool residual)
    : dim(d), use_bias(bias), use_residual(residual), W("cross.W", d, d, true), b("cross.b", 1, d) {}

Matrix CrossLayer::forward(const Matrix& x0, const Matrix& xl, Cache* cache) const {
    require_same_shape(x0, xl, "cross_forward");
    if (xl.cols() != dim)
        throw std::invalid_argument("cross_forward: input width " + std::to_string(xl.cols()) +
                                    " != layer dim " + std::to_string(dim));
    Matrix pre;
    matmul_a_bt_into(xl, W.value, pre);
    if (use_bias) add_row_bias(pre, b.value);
    Matrix out;
    hadamard_into(x0, pre, out);
    if (use_residual) add_into(xl, out);
    if (cache != nullptr) {
        cache->x0 = x0;
        cache->xl = xl;
        cache->pre = std::move(pre);
    }
    return out;
}

std::pair<Matrix, Matrix> CrossLayer::backward(const Cache& cache, const Matrix& d_out) {
    require_same_shape(cache.xl, d_out, "cross_backward");
    Matrix d_pre;
    hadamard_into(d_out, cache.x0, d_pre);
    if (use_bias) colsum_accumulate(d_pre, b.grad);
    matmul_at_b_into(d_pre, cache.xl, W.grad, /*accumulate=*/true);
    Matrix d_xl = matmul(d_pre, W.value);
    if (use_residual) add_into(d_out, d_xl);
    Matrix d_x0;
    hadamard_into(d_out, cache.pre, d_x0);
    return {std::move(d_x0), std::move(d_xl)};
}

void CrossLayer::init_params(Rng& rng) {
    he_normal_init(W.value, dim, rng);
    b.value.fill(0.0);
}

std::size_t CrossLayer::param_count() const { return dim * dim + (use_bias ? dim : 0); }

std::vector<Param*> CrossLayer::params() {
    std::vector<Param*> p{&W};
    if (use_bias) p.push_back(&b);
    return p;
}

// ---------------------------------------------------------------------------
// Dcnv1Layer
// ---------------------------------------------------------------------------

Dcnv1Layer::Dcnv1Layer(std::size_t d) : dim(d), w("dcnv1.w", 1, d, true), b("dcnv1.b", 1, d) {}

Matrix Dcnv1Layer::forward(const Matrix& x0, const Matrix& xl, Cache* cache) const {
    require_same_shape(x0, xl, "dcnv1_forward");
    Matrix pre(xl.rows(), dim);
    for (std::size_t r = 0; r < xl.rows(); ++r) {
        const double s = dot(Vector(xl.row(r), xl.row(r) + dim), Vector(w.value.row(0), w.value.row(0) + dim));
        for (std::size_t c = 0; c < dim; ++c) pre(r, c) = s + b.value(0, c);
    }
    Matrix out;
    hadamard_into(x0, pre, out);
    add_into(xl, out);
    if (cache != nullptr) {
        cache->x0 = x0;
        cache->xl = xl;
        cache->pre = std::move(pre);
    }
    return out;
}

std::pair<Matrix, Matrix> Dcnv1Layer::backward(const Cache& cache, const Matrix& d_out) {
    require_same_shape(cache.xl, d_out, "dcnv1_backward");
    Matrix d_pre;
    hadamard_into(d_out, cache.x0, d_pre);
    colsum_accumulate(d_pre, b.grad);
    Matrix d_xl = d_out;  // residual path
    for (std::size_t r = 0; r < d_pre.rows(); ++r) {
        double ds = 0.0;
        for (std::size_t c = 0; c < dim; ++c) ds += d_pre(r, c);
        for (std::size_t c = 0; c < dim; ++c) {
            w.grad(0, c) += ds * cache.xl(r, c);
            d_xl(r, c) += ds * w.value(0, c);
        }
    }
    Matrix d_x0;
    hadamard_into(d_out, cache.pre, d_x0);
    return {std::move(d_x0), std::move(d_xl)};
}

void Dcnv1Layer::init_params(Rng& rng) {
    he_normal_init(w.value, dim, rng);
    b.value.fill(0.0);
}

std::size_t Dcnv1Layer::param_count() const { return 2 * dim; }

std::vector<Param*> Dcnv1Layer::params() { return {&w, &b}; }

// ---------------------------------------------------------------------------
// LowRankCrossLayer
// ---------------------------------------------------------------------------

LowRankCrossLayer::LowRankCrossLayer(std::size_t d, std::size_t r)
    : dim(d), rank(r), U("lowrank.U", d, r, true), V("lowrank.V", d, r, true), b("lowrank.b", 1, d) {
    if (r < 1) throw std::invalid_argument("low-rank cross layer: rank must be >= 1");
}

Matrix LowRankCrossLayer::forward(const Matrix& x0, const Matrix& xl, Cache* cache) const {
    require_same_shape(x0, xl, "lowrank_cross_forward");
    LowRankCoreCache local;
    LowRankCoreCache& cc = cache != nullptr ? cache->core : local;
    Matrix out = lowrank_core_forward(x0, xl, U, V, nullptr, b, Activation::identity, cc);
    add_into(xl, out);
    if (cache != nullptr) {
        cache->x0 = x0;
        cache->xl = xl;
    }
    return out;
}

std::pair<Matrix, Matrix> LowRankCrossLayer::backward(const Cache& cache, const Matrix& d_out) {
    require_same_shape(cache.xl, d_out, "lowrank_cross_backward");
    Matrix d_x0(d_out.rows(), d_out.cols());
    Matrix d_xl = d_out;  // residual path
    lowrank_core_backward(d_out, cache.x0, cache.xl, U, V, nullptr, b, Activation::identity, cache.core, d_x0,
                          d_xl);
    return {std::move(d_x0), std::move(d_xl)};
}

void LowRankCrossLayer::init_params(Rng& rng) {
    he_normal_init(U.value, rank, rng);
    he_normal_init(V.value, dim, rng);
    b.value.fill(0.0);
}

std::size_t LowRankCrossLayer::param_count() const { return 2 * dim * rank + dim; }

std::vector<Param*> LowRankCrossLayer::params() { return {&U, &V, &b}; }

// ---------------------------------------------------------------------------
// MixtureCrossLayer
// ---------------------------------------------------------------------------

std::string to_string(GateMode m) {
    switch (m) {
        case GateMode::softmax: return "softmax";
        case GateMode::sigmoid: return "sigmoid";
        case GateMode::constant_one: return "constant_one";
    }
    return "?";
}

GateMode gate_mode_from_string(const std::string& s) {
    if (s == "softmax") return GateMode::softmax;
    if (s == "sigmoid") return GateMode::sigmoid;
    if (s == "constant_one") return GateMode::constant_one;
    throw std::invalid_argument("unknown gate mode: " + s);
}

MixtureCrossLayer::MixtureCrossLayer(std::size_t d, std::size_t k, std::size_t r, GateMode mode, bool with_c,
                                     Activation g)
    : MixtureCrossLayer(d, std::vector<std::size_t>(k, r), mode, with_c, g) {}

MixtureCrossLayer::MixtureCrossLayer(std::size_t d, const std::vector<std::size_t>& ranks, GateMode mode,
                                     bool with_c, Activation g)
    : dim(d), gate("mixture.gate", ranks.size(), d), gate_mode(mode), expert_activation(g) {
    if (ranks.empty()) throw std::invalid_argument("mixture cross layer: need at least one expert");
    experts.reserve(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        const std::size_t r = ranks[i];
        if (r < 1) throw std::invalid_argument("mixture cross layer: rank must be >= 1");
        Expert e;
        e.rank = r;
        e.has_c = with_c;
        const std::string tag = "mixture.e" + std::to_string(i);
        e.U = Param(tag + ".U", d, r, true);
        e.V = Param(tag + ".V", d, r, true);
        if (with_c) e.C = Param(tag + ".C", r, r, true);
        e.b = Param(tag + ".b", 1, d);
        experts.push_back(std::move(e));
    }
}

Matrix MixtureCrossLayer::forward(const Matrix& x0, const Matrix& xl, Cache* cache) const {
    require_same_shape(x0, xl, "mixture_cross_forward");
    const std::size_t batch = xl.rows(), k = experts.size();

    Matrix logits;
    matmul_a_bt_into(xl, gate.value, logits);  // B x K
    Matrix gates(batch, k);
    switch (gate_mode) {
        case GateMode::softmax:
            for (std::size_t r = 0; r < batch; ++r) {
                double mx = logits(r, 0);
                for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, logits(r, i));
                double sum = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    gates(r, i) = std::exp(logits(r, i) - mx);
                    sum += gates(r, i);
                }
                for (std::size_t i = 0; i < k; ++i) gates(r, i) /= sum;
            }
            break;
        case GateMode::sigmoid:
            for (std::size_t i = 0; i < gates.size(); ++i)
                gates.data()[i] = 1.0 / (1.0 + std::exp(-logits.data()[i]));
            break;
        case GateMode::constant_one:
            gates.fill(1.0);
            break;
    }

    std::vector<LowRankCoreCache> local;
    std::vector<LowRankCoreCache>& cores = cache != nullptr ? cache->expert : local;
    cores.assign(k, {});

    Matrix acc(batch, dim);
    for (std::size_t i = 0; i < k; ++i) {
        const Expert& e = experts[i];
        const Matrix& eout = lowrank_core_forward(x0, xl, e.U, e.V, e.has_c ? &e.C : nullptr, e.b,
                                                  expert_activation, cores[i]);
        for (std::size_t r = 0; r < batch; ++r) {
            const double gi = gates(r, i);
            double* ar = acc.row(r);
            const double* er = eout.row(r);
            for (std::size_t c = 0; c < dim; ++c) ar[c] += gi * er[c];
        }
    }
    add_into(xl, acc);
    if (cache != nullptr) {
        cache->x0 = x0;
        cache->xl = xl;
        cache->logits = std::move(logits);
        cache->gates = std::move(gates);
    }
    return acc;
}

std::pair<Matrix, Matrix> MixtureCrossLayer::backward(const Cache& cache, const Matrix& d_out) {
    require_same_shape(cache.xl, d_out, "mixture_cross_backward");
    const std::size_t batch = d_out.rows(), k = experts.size();
    if (cache.expert.size() != k) throw std::invalid_argument("mixture_cross_backward: stale cache");

    Matrix d_x0(batch, dim);
    Matrix d_xl = d_out;  // residual path
    Matrix d_gates(batch, k);

    for (std::size_t i = 0; i < k; ++i) {
        Expert& e = experts[i];
        const Matrix& eout = cache.expert[i].out;
        // dL/dG_i = <d_out, E_i> per example; dL/dE_i = G_i d_out.
        Matrix d_e(batch, dim);
        for (std::size_t r = 0; r < batch; ++r) {
            const double gi = cache.gates(r, i);
            const double* dr = d_out.row(r);
            const double* er = eout.row(r);
            double* der = d_e.row(r);
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                acc += dr[c] * er[c];
                der[c] = gi * dr[c];
            }
            d_gates(r, i) = acc;
        }
        lowrank_core_backward(d_e, cache.x0, cache.xl, e.U, e.V, e.has_c ? &e.C : nullptr, e.b,
                              expert_activation, cache.expert[i], d_x0, d_xl);
    }

    // Gate-logit backward, then into gate params and xl.
    Matrix d_logits(batch, k);
    switch (gate_mode) {
        case GateMode::softmax:
            for (std::size_t r = 0; r < batch; ++r) {
                double inner = 0.0;
                for (std::size_t i = 0; i < k; ++i) inner += d_gates(r, i) * cache.gates(r, i);
                for (std::size_t i = 0; i < k; ++i)
                    d_logits(r, i) = cache.gates(r, i) * (d_gates(r, i) - inner);
            }
            break;
        case GateMode::sigmoid:
            for (std::size_t i = 0; i < d_logits.size(); ++i) {
                const double gv = cache.gates.data()[i];
                d_logits.data()[i] = d_gates.data()[i] * gv * (1.0 - gv);
            }
            break;
        case GateMode::constant_one:
            d_logits.fill(0.0);
            break;
    }
    matmul_at_b_into(d_logits, cache.xl, gate.grad, /*accumulate=*/true);
    Matrix d_xl_gate = matmul(d_logits, gate.value);
    add_into(d_xl_gate, d_xl);

    return {std::move(d_x0), std::move(d_xl)};
}

void MixtureCrossLayer::init_params(Rng& rng) {
    for (auto& e : experts) {
        he_normal_init(e.U.value, e.rank, rng);
        he_normal_init(e.V.value, dim, rng);
        if (e.has_c) he_normal_init(e.C.value, e.rank, rng);
        e.b.value.fill(0.0);
    }
    he_normal_init(gate.value, dim, rng);
}

std::size_t MixtureCrossLayer::param_count() const {
    std::size_t n = experts.size() * dim;  // gate functionals
    for (const auto& e : experts) n += 2 * dim * e.rank + dim + (e.has_c ? e.rank * e.rank : 0);
    return n;
}

std::vector<Param*> MixtureCrossLayer::params() {
    std::vector<Param*> p;
    for (auto& e : experts) {
        p.push_back(&e.U);
        p.push_back(&e.V);
        if (e.has_c) p.push_back(&e.C);
        p.push_back(&e.b);
    }
    p.push_back(&gate);
    return p;
}

// ---------------------------------------------------------------------------
// DenseLayer
// ---------------------------------------------------------------------------

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation f)
    : in_dim(in), out_dim(out), activation(f), W("dense.W", out, in, true), b("dense.b", 1, out) {}

Matrix DenseLayer::forward(const Matrix& h, Cache* cache) const {
    if (h.cols() != in_dim)
        throw std::invalid_argument("dense_forward: input width " + std::to_string(h.cols()) +
                                    " != layer in_dim " + std::to_string(in_dim));
    Matrix z;
    matmul_a_bt_into(h, W.value, z);
    add_row_bias(z, b.value);
    Matrix out;
    apply_activation(activation, z, out);
    if (cache != nullptr) {
        cache->h = h;
        cache->z = std::move(z);
    }
    return out;
}

Matrix DenseLayer::backward(const Cache& cache, const Matrix& d_out) {
    Matrix d_z;
    activation_backward(activation, cache.z, d_out, d_z);
    matmul_at_b_into(d_z, cache.h, W.grad, /*accumulate=*/true);
    colsum_accumulate(d_z, b.grad);
    return matmul(d_z, W.value);
}

void DenseLayer::init_params(Rng& rng) {
    he_normal_init(W.value, in_dim, rng);
    b.value.fill(0.0);
}

std::size_t DenseLayer::param_count() const { return out_dim * in_dim + out_dim; }

std::vector<Param*> DenseLayer::params() { return {&W, &b}; }

// ---------------------------------------------------------------------------
// EmbeddingLayer
// ---------------------------------------------------------------------------

EmbeddingLayer::EmbeddingLayer(std::vector<EmbeddingFeatureSpec> specs, std::size_t dense)
    : features(std::move(specs)), dense_count(dense) {
    tables.reserve(features.size());
    for (const auto& f : features) {
        if (f.vocab == 0 || f.embed_dim == 0)
            throw std::invalid_argument("embedding feature " + f.name + ": vocab and embed_dim must be positive");
        tables.emplace_back("embed." + f.name, f.embed_dim, f.vocab);
    }
}

std::size_t EmbeddingLayer::output_dim() const {
    std::size_t d = dense_count;
    for (const auto& f : features) d += f.embed_dim;
    return d;
}

Vector EmbeddingLayer::forward(const SparseExample& ex) const {
    if (ex.indices.size() != features.size())
        throw std::invalid_argument("embedding_forward: expected " + std::to_string(features.size()) +
                                    " index lists, got " + std::to_string(ex.indices.size()));
    if (ex.dense.size() != dense_count)
        throw std::invalid_argument("embedding_forward: expected " + std::to_string(dense_count) +
                                    " dense values, got " + std::to_string(ex.dense.size()));
    Vector x0;
    x0.reserve(output_dim());
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& lookups = ex.indices[f];
        if (lookups.empty())
            throw std::invalid_argument("embedding_forward: feature " + features[f].name + " has no index");
        const Matrix& table = tables[f].value;
        Vector seg(features[f].embed_dim, 0.0);
        for (const auto idx : lookups) {
            if (idx >= features[f].vocab)
                throw std::invalid_argument("embedding_forward: feature " + features[f].name + " index " +
                                            std::to_string(idx) + " out of vocab " +
                                            std::to_string(features[f].vocab));
            for (std::size_t e = 0; e < seg.size(); ++e) seg[e] += table(e, idx);
        }
        const double inv = 1.0 / static_cast<double>(lookups.size());
        for (double& v : seg) v *= inv;
        x0.insert(x0.end(), seg.begin(), seg.end());
    }
    x0.insert(x0.end(), ex.dense.begin(), ex.dense.end());
    return x0;
}

Matrix EmbeddingLayer::forward_batch(const std::vector<SparseExample>& batch) const {
    Matrix out(batch.size(), output_dim());
    for (std::size_t r = 0; r < batch.size(); ++r) {
        Vector x0 = forward(batch[r]);
        for (std::size_t c = 0; c < x0.size(); ++c) out(r, c) = x0[c];
    }
    return out;
}

void EmbeddingLayer::backward_batch(const std::vector<SparseExample>& batch, const Matrix& d_x0) {
    if (d_x0.rows() != batch.size() || d_x0.cols() != output_dim())
        throw std::invalid_argument("embedding_backward: gradient shape " + shape_str(d_x0) + " mismatch");
    for (std::size_t r = 0; r < batch.size(); ++r) {
        std::size_t offset = 0;
        for (std::size_t f = 0; f < features.size(); ++f) {
            const auto& lookups = batch[r].indices[f];
            Matrix& grad = tables[f].grad;
            const double inv = 1.0 / static_cast<double>(lookups.size());
            for (const auto idx : lookups)
                for (std::size_t e = 0; e < features[f].embed_dim; ++e)
                    grad(e, idx) += inv * d_x0(r, offset + e);
            offset += features[f].embed_dim;
        }
    }
}

void EmbeddingLayer::init_params(Rng& rng) {
    for (std::size_t f = 0; f < features.size(); ++f) he_normal_init(tables[f].value, features[f].vocab, rng);
}

std::size_t EmbeddingLayer::param_count() const {
    std::size_t n = 0;
    for (const auto& f : features) n += f.embed_dim * f.vocab;
    return n;
}

std::vector<Param*> EmbeddingLayer::params() {
    std::vector<Param*> p;
    for (auto& t : tables) p.push_back(&t);
    return p;
}

// ---------------------------------------------------------------------------
// Single-example wrappers
// ---------------------------------------------------------------------------

Vector cross_forward(const CrossLayer& layer, const Vector& x0, const Vector& xl) {
    return layer.forward(row_matrix(x0), row_matrix(xl), nullptr).row_copy(0);
}

Vector dcnv1_forward(const Dcnv1Layer& layer, const Vector& x0, const Vector& xl) {
    return layer.forward(row_matrix(x0), row_matrix(xl), nullptr).row_copy(0);
}

Vector lowrank_cross_forward(const LowRankCrossLayer& layer, const Vector& x0, const Vector& xl) {
    return layer.forward(row_matrix(x0), row_matrix(xl), nullptr).row_copy(0);
}

Vector mixture_cross_forward(const MixtureCrossLayer& layer, const Vector& x0, const Vector& xl) {
    return layer.forward(row_matrix(x0), row_matrix(xl), nullptr).row_copy(0);
}

Vector dense_forward(const DenseLayer& layer, const Vector& h) {
    return layer.forward(row_matrix(h), nullptr).row_copy(0);
}

}  // namespace crossnet
