#include "crossnet/model.hpp"

#include <cmath>
#include <stdexcept>

namespace crossnet {

namespace {
constexpr double kProbClamp = 1e-12;
}

std::string to_string(StructureKind s) {
    switch (s) {
        case StructureKind::stacked: return "stacked";
        case StructureKind::parallel: return "parallel";
        case StructureKind::cross_only: return "cross_only";
        case StructureKind::dnn_only: return "dnn_only";
    }
    return "?";
}

std::string to_string(Task t) {
    return t == Task::binary_logloss ? "binary_logloss" : "regression_mse";
}

std::string to_string(CrossKind k) {
    switch (k) {
        case CrossKind::full: return "full";
        case CrossKind::lowrank: return "lowrank";
        case CrossKind::mixture: return "mixture";
        case CrossKind::dcnv1: return "dcnv1";
    }
    return "?";
}

StructureKind structure_from_string(const std::string& s) {
    if (s == "stacked") return StructureKind::stacked;
    if (s == "parallel") return StructureKind::parallel;
    if (s == "cross_only") return StructureKind::cross_only;
    if (s == "dnn_only") return StructureKind::dnn_only;
    throw std::invalid_argument("unknown structure: " + s);
}

Task task_from_string(const std::string& s) {
    if (s == "binary_logloss") return Task::binary_logloss;
    if (s == "regression_mse") return Task::regression_mse;
    throw std::invalid_argument("unknown task: " + s);
}

CrossKind cross_kind_from_string(const std::string& s) {
    if (s == "full") return CrossKind::full;
    if (s == "lowrank") return CrossKind::lowrank;
    if (s == "mixture") return CrossKind::mixture;
    if (s == "dcnv1") return CrossKind::dcnv1;
    throw std::invalid_argument("unknown cross kind: " + s);
}

void ModelSpec::validate() const {
    if (input_dim == 0) throw std::invalid_argument("model: input_dim must be positive");
    switch (structure) {
        case StructureKind::cross_only:
            if (!deep_sizes.empty()) throw std::invalid_argument("cross_only model cannot have deep layers");
            break;
        case StructureKind::dnn_only:
            if (!cross_layers.empty()) throw std::invalid_argument("dnn_only model cannot have cross layers");
            if (deep_sizes.empty()) throw std::invalid_argument("dnn_only model needs at least one deep layer");
            break;
        case StructureKind::stacked:
        case StructureKind::parallel:
            if (deep_sizes.empty())
                throw std::invalid_argument(to_string(structure) + " model needs at least one deep layer");
            break;
    }
    for (const auto& cl : cross_layers) {
        if ((cl.kind == CrossKind::lowrank || cl.kind == CrossKind::mixture) && cl.rank == 0)
            throw std::invalid_argument("lowrank/mixture cross layers need rank >= 1");
        if (cl.kind == CrossKind::mixture && cl.experts == 0)
            throw std::invalid_argument("mixture cross layers need at least one expert");
    }
    if (has_embedding) {
        std::size_t d = dense_features;
        for (const auto& f : embed_features) d += f.embed_dim;
        if (d != input_dim)
            throw std::invalid_argument("embedding dims sum to " + std::to_string(d) +
                                        " but input_dim is " + std::to_string(input_dim));
    }
}

std::size_t ModelSpec::final_dim() const {
    switch (structure) {
        case StructureKind::cross_only: return input_dim;
        case StructureKind::dnn_only:
        case StructureKind::stacked: return deep_sizes.back();
        case StructureKind::parallel: return input_dim + deep_sizes.back();
    }
    return 0;
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const std::size_t d = spec_.input_dim;
    if (spec_.has_embedding) embedding_ = EmbeddingLayer(spec_.embed_features, spec_.dense_features);

    for (const auto& cl : spec_.cross_layers) {
        switch (cl.kind) {
            case CrossKind::full: cross_.emplace_back(CrossLayer(d, cl.use_bias, cl.use_residual)); break;
            case CrossKind::dcnv1: cross_.emplace_back(Dcnv1Layer(d)); break;
            case CrossKind::lowrank: cross_.emplace_back(LowRankCrossLayer(d, cl.rank)); break;
            case CrossKind::mixture:
                cross_.emplace_back(
                    MixtureCrossLayer(d, cl.experts, cl.rank, cl.gate, cl.with_c, cl.expert_activation));
                break;
        }
    }

    std::size_t in = d;
    for (const std::size_t out : spec_.deep_sizes) {
        deep_.emplace_back(in, out, spec_.deep_activation);
        in = out;
    }

    w_logit_ = Param("head.w_logit", 1, spec_.final_dim(), true);
    if (spec_.head_bias) head_bias_ = Param("head.bias", 1, 1);

    // Stack-position prefixes keep parameter names unique for checkpoints.
    for (std::size_t i = 0; i < cross_.size(); ++i)
        std::visit(
            [&](auto& l) {
                for (Param* p : l.params()) p->name = "c" + std::to_string(i) + "." + p->name;
                },
            cross_[i]);
    for (std::size_t i = 0; i < deep_.size(); ++i)
        for (Param* p : deep_[i].params()) p->name = "d" + std::to_string(i) + "." + p->name;
}

void Model::init_params(Rng& rng) {
    if (spec_.has_embedding) embedding_.init_params(rng);
    for (auto& layer : cross_)
        std::visit([&](auto& l) { l.init_params(rng); }, layer);
    for (auto& layer : deep_) layer.init_params(rng);
    he_normal_init(w_logit_.value, spec_.final_dim(), rng);
    if (spec_.head_bias) head_bias_.value.fill(0.0);
}

std::vector<Param*> Model::params() {
    std::vector<Param*> out;
    if (spec_.has_embedding)
        for (Param* p : embedding_.params()) out.push_back(p);
    for (auto& layer : cross_) {
        std::visit(
            [&](auto& l) {
                for (Param* p : l.params()) out.push_back(p);
            },
            layer);
    }
    for (auto& layer : deep_)
        for (Param* p : layer.params()) out.push_back(p);
    out.push_back(&w_logit_);
    if (spec_.head_bias) out.push_back(&head_bias_);
    return out;
}

std::vector<const Param*> Model::params() const {
    std::vector<const Param*> out;
    for (Param* p : const_cast<Model*>(this)->params()) out.push_back(p);
    return out;
}

std::size_t Model::param_count() const {
    std::size_t n = 0;
    for (const Param* p : params()) n += p->size();
    return n;
}

void Model::zero_grad() {
    for (Param* p : params()) p->zero_grad();
}

Matrix Model::input_matrix(const Batch& batch) const {
    if (spec_.has_embedding) {
        if (batch.examples.size() != batch.labels.size())
            throw std::invalid_argument("batch: example/label count mismatch");
        return embedding_.forward_batch(batch.examples);
    }
    if (batch.x.rows() != batch.labels.size())
        throw std::invalid_argument("batch: row/label count mismatch");
    if (batch.x.cols() != spec_.input_dim)
        throw std::invalid_argument("batch: input width " + std::to_string(batch.x.cols()) +
                                    " != model input_dim " + std::to_string(spec_.input_dim));
    return batch.x;
}

Vector Model::forward(const Batch& batch, ForwardCache* cache) const {
    if (batch.size() == 0) throw std::invalid_argument("model_forward: empty batch");
    Matrix x0 = input_matrix(batch);
    const std::size_t n = x0.rows();

    ForwardCache local;
    ForwardCache& cc = cache != nullptr ? *cache : local;
    cc.cross.clear();
    cc.deep.clear();

    Matrix xl = x0;
    for (const auto& layer : cross_) {
        xl = std::visit(
            [&](const auto& l) {
                using L = std::decay_t<decltype(l)>;
                typename L::Cache lc;
                Matrix out = l.forward(x0, xl, &lc);
                cc.cross.emplace_back(std::move(lc));
                return out;
            },
            layer);
    }

    Matrix final_out;
    if (spec_.structure == StructureKind::cross_only) {
        final_out = xl;
    } else {
        // stacked feeds x_{L_c} to the deep stack; parallel and dnn_only feed x0.
        Matrix h = spec_.structure == StructureKind::stacked ? xl : x0;
        for (const auto& layer : deep_) {
            DenseLayer::Cache lc;
            h = layer.forward(h, &lc);
            cc.deep.push_back(std::move(lc));
        }
        if (spec_.structure == StructureKind::parallel) {
            final_out = Matrix(n, spec_.final_dim());
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < spec_.input_dim; ++c) final_out(r, c) = xl(r, c);
                for (std::size_t c = 0; c < h.cols(); ++c) final_out(r, spec_.input_dim + c) = h(r, c);
            }
        } else {
            final_out = h;
        }
    }

    Vector logits(n);
    for (std::size_t r = 0; r < n; ++r) {
        double z = 0.0;
        const double* fr = final_out.row(r);
        const double* wr = w_logit_.value.row(0);
        for (std::size_t c = 0; c < final_out.cols(); ++c) z += fr[c] * wr[c];
        if (spec_.head_bias) z += head_bias_.value(0, 0);
        logits[r] = z;
    }

    Vector preds(n);
    if (spec_.task == Task::binary_logloss)
        for (std::size_t r = 0; r < n; ++r) preds[r] = sigmoid(logits[r]);
    else
        preds = logits;

    cc.x0 = std::move(x0);
    cc.final_out = std::move(final_out);
    cc.logits = std::move(logits);
    cc.predictions = preds;
    return preds;
}

double Model::loss(const Vector& predictions, const Vector& labels, double lambda) const {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("loss: prediction/label count mismatch");
    if (predictions.empty()) throw std::invalid_argument("loss: empty input");
    if (lambda < 0.0) throw std::invalid_argument("loss: lambda must be >= 0");
    const double n = static_cast<double>(predictions.size());
    double data = 0.0;
    if (spec_.task == Task::binary_logloss) {
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            const double p = std::min(1.0 - kProbClamp, std::max(kProbClamp, predictions[i]));
            data += -(labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p));
        }
    } else {
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            const double e = predictions[i] - labels[i];
            data += e * e;
        }
    }
    data /= n;
    if (lambda > 0.0) {
        double reg = 0.0;
        for (const Param* p : params())
            if (p->regularized)
                for (std::size_t i = 0; i < p->value.size(); ++i) reg += p->value.data()[i] * p->value.data()[i];
        data += lambda * reg;
    }
    return data;
}

void Model::backward(const Batch& batch, const ForwardCache& cache, double lambda) {
    const std::size_t n = batch.size();
    if (cache.logits.size() != n) throw std::invalid_argument("model_backward: stale cache");
    const double inv_n = 1.0 / static_cast<double>(n);

    // d(data loss)/d(logit): (p - y)/N for sigmoid + logloss, 2(p - y)/N for MSE.
    Vector d_logit(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = cache.predictions[i] - batch.labels[i];
        d_logit[i] = spec_.task == Task::binary_logloss ? diff * inv_n : 2.0 * diff * inv_n;
    }

    Matrix d_final(n, cache.final_out.cols());
    for (std::size_t r = 0; r < n; ++r) {
        const double dz = d_logit[r];
        const double* fr = cache.final_out.row(r);
        double* wg = w_logit_.grad.row(0);
        const double* wv = w_logit_.value.row(0);
        double* dr = d_final.row(r);
        for (std::size_t c = 0; c < cache.final_out.cols(); ++c) {
            wg[c] += dz * fr[c];
            dr[c] = dz * wv[c];
        }
        if (spec_.head_bias) head_bias_.grad(0, 0) += dz;
    }

    Matrix d_x0_total(n, spec_.input_dim);
    Matrix d_xl;  // gradient flowing into the top of the cross stack

    if (spec_.structure == StructureKind::cross_only) {
        d_xl = std::move(d_final);
    } else {
        Matrix d_cross_top;
        Matrix d_deep_out;
        if (spec_.structure == StructureKind::parallel) {
            d_cross_top = Matrix(n, spec_.input_dim);
            d_deep_out = Matrix(n, deep_.back().out_dim);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < spec_.input_dim; ++c) d_cross_top(r, c) = d_final(r, c);
                for (std::size_t c = 0; c < d_deep_out.cols(); ++c)
                    d_deep_out(r, c) = d_final(r, spec_.input_dim + c);
            }
        } else {
            d_deep_out = std::move(d_final);
        }
        for (std::size_t i = deep_.size(); i-- > 0;) d_deep_out = deep_[i].backward(cache.deep[i], d_deep_out);
        switch (spec_.structure) {
            case StructureKind::stacked: d_xl = std::move(d_deep_out); break;
            case StructureKind::parallel:
                d_xl = std::move(d_cross_top);
                add_into(d_deep_out, d_x0_total);
                break;
            case StructureKind::dnn_only: add_into(d_deep_out, d_x0_total); break;
            case StructureKind::cross_only: break;
        }
    }

    if (!cross_.empty()) {
        if (cache.cross.size() != cross_.size()) throw std::invalid_argument("model_backward: stale cache");
        for (std::size_t i = cross_.size(); i-- > 0;) {
            auto [d_x0_part, d_xl_part] = std::visit(
                [&](auto& l) {
                    using L = std::decay_t<decltype(l)>;
                    return l.backward(std::get<typename L::Cache>(cache.cross[i]), d_xl);
                },
                cross_[i]);
            add_into(d_x0_part, d_x0_total);
            d_xl = std::move(d_xl_part);
        }
        // x_0 doubles as the input of the first cross layer.
        add_into(d_xl, d_x0_total);
    } else if (spec_.structure == StructureKind::stacked || spec_.structure == StructureKind::cross_only) {
        if (!d_xl.empty()) add_into(d_xl, d_x0_total);
    }

    if (spec_.has_embedding) embedding_.backward_batch(batch.examples, d_x0_total);

    if (lambda > 0.0) {
        for (Param* p : params())
            if (p->regularized)
                for (std::size_t i = 0; i < p->value.size(); ++i)
                    p->grad.data()[i] += 2.0 * lambda * p->value.data()[i];
    }
}

double Model::evaluate_loss(const Batch& batch, double lambda) const {
    return loss(forward(batch, nullptr), batch.labels, lambda);
}

double rmse(const Vector& predictions, const Vector& labels) {
    if (predictions.size() != labels.size()) throw std::invalid_argument("rmse: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("rmse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - labels[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(predictions.size()));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace crossnet
