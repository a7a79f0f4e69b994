#include "crossnet/optim.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace crossnet {

AdamState::AdamState(const std::vector<Param*>& params) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const Param* p : params) {
        m.emplace_back(p->value.rows(), p->value.cols());
        v.emplace_back(p->value.rows(), p->value.cols());
    }
}

double clip_global_norm(const std::vector<Param*>& params, double max_norm) {
    if (max_norm <= 0.0) throw std::invalid_argument("clip_global_norm: max_norm must be positive");
    double sq = 0.0;
    for (const Param* p : params) {
        for (std::size_t i = 0; i < p->grad.size(); ++i) {
            const double g = p->grad.data()[i];
            if (!std::isfinite(g)) throw std::invalid_argument("clip_global_norm: non-finite gradient in " + p->name);
            sq += g * g;
        }
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (Param* p : params)
            for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad.data()[i] *= scale;
    }
    return norm;
}

void adam_apply(AdamState& state, const std::vector<Param*>& params, double lr) {
    if (params.size() != state.m.size()) throw std::invalid_argument("adam_apply: state/params mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Param* p = params[k];
        double* m = state.m[k].data();
        double* v = state.v[k].data();
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad.data()[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p->value.data()[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

void ema_update(std::vector<Matrix>& shadow, const std::vector<Param*>& params, double decay) {
    if (shadow.size() != params.size()) throw std::invalid_argument("ema_update: shadow/params mismatch");
    for (std::size_t k = 0; k < params.size(); ++k) {
        double* s = shadow[k].data();
        const double* v = params[k]->value.data();
        for (std::size_t i = 0; i < params[k]->value.size(); ++i)
            s[i] = decay * s[i] + (1.0 - decay) * v[i];
    }
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("train config: learning_rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (clip_norm <= 0.0) throw std::invalid_argument("train config: clip_norm must be positive");
    if (ema_decay < 0.0 || ema_decay >= 1.0) throw std::invalid_argument("train config: ema_decay must be in [0, 1)");
    if (lambda < 0.0) throw std::invalid_argument("train config: lambda must be >= 0");
    if (eval_every < 1) throw std::invalid_argument("train config: eval_every must be >= 1");
}

TrainingDiverged::TrainingDiverged(std::size_t at_step, double loss_value)
    : std::runtime_error("training diverged at step " + std::to_string(at_step) + " (loss " +
                         std::to_string(loss_value) + ")"),
      step(at_step) {}

Batch Dataset::gather(const std::vector<std::size_t>& idx) const {
    Batch b;
    b.labels.reserve(idx.size());
    if (sparse()) {
        b.examples.reserve(idx.size());
        for (const std::size_t i : idx) {
            b.examples.push_back(examples[i]);
            b.labels.push_back(labels[i]);
        }
    } else {
        b.x = Matrix(idx.size(), x.cols());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const double* src = x.row(idx[r]);
            double* dst = b.x.row(r);
            for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = src[c];
            b.labels.push_back(labels[idx[r]]);
        }
    }
    return b;
}

Batch Dataset::all() const {
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return gather(idx);
}

namespace {

struct EvalOutcome {
    double loss = 0.0;
    double metric = 0.0;
};

// Evaluates loss (lambda included) and the task metric in batches.
EvalOutcome evaluate(const Model& model, const Dataset& data, double lambda, std::size_t batch_size) {
    EvalOutcome out;
    Vector preds;
    preds.reserve(data.size());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < data.size(); start += batch_size) {
        const std::size_t end = std::min(data.size(), start + batch_size);
        idx.resize(end - start);
        std::iota(idx.begin(), idx.end(), start);
        const Batch b = data.gather(idx);
        Vector p = model.forward(b, nullptr);
        preds.insert(preds.end(), p.begin(), p.end());
    }
    out.loss = model.loss(preds, data.labels, lambda);
    if (model.spec().task == Task::regression_mse)
        out.metric = rmse(preds, data.labels);
    else
        out.metric = model.loss(preds, data.labels, 0.0);
    return out;
}

}  // namespace

TrainHistory train(Model& model, const Dataset& train_data, const Dataset& eval_data, const TrainConfig& config,
                   bool load_ema) {
    config.validate();
    if (train_data.size() == 0) throw std::invalid_argument("train: empty dataset");

    std::vector<Param*> params = model.params();
    AdamState adam(params);
    std::vector<Matrix> shadow;
    shadow.reserve(params.size());
    for (const Param* p : params) shadow.push_back(p->value);  // shadow starts at the initial weights

    Rng shuffle_rng(config.seed);
    TrainHistory history;

    std::vector<std::size_t> order(train_data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = order.size();  // forces a shuffle before the first batch

    const std::size_t eval_batch = std::max<std::size_t>(config.batch_size, 1024);
    double interval_loss = 0.0;
    std::size_t interval_count = 0;
    const auto started = std::chrono::steady_clock::now();

    auto run_eval = [&](std::size_t step) {
        EvalRecord rec;
        rec.step = step;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        rec.train_loss = interval_count > 0 ? interval_loss / static_cast<double>(interval_count) : 0.0;
        const EvalOutcome raw = evaluate(model, eval_data, config.lambda, eval_batch);
        rec.eval_loss_raw = raw.loss;
        rec.eval_metric_raw = raw.metric;
        for (std::size_t k = 0; k < params.size(); ++k) std::swap(params[k]->value, shadow[k]);
        const EvalOutcome ema = evaluate(model, eval_data, config.lambda, eval_batch);
        for (std::size_t k = 0; k < params.size(); ++k) std::swap(params[k]->value, shadow[k]);
        rec.eval_loss = ema.loss;
        rec.eval_metric = ema.metric;
        history.records.push_back(rec);
        interval_loss = 0.0;
        interval_count = 0;
    };

    std::vector<std::size_t> batch_idx;
    for (std::size_t step = 1; step <= config.steps; ++step) {
        batch_idx.clear();
        while (batch_idx.size() < config.batch_size) {
            if (cursor == order.size()) {
                shuffle_rng.shuffle(order);
                cursor = 0;
            }
            batch_idx.push_back(order[cursor++]);
        }
        const Batch batch = train_data.gather(batch_idx);

        model.zero_grad();
        Model::ForwardCache cache;
        const Vector preds = model.forward(batch, &cache);
        const double batch_loss = model.loss(preds, batch.labels, config.lambda);
        if (!std::isfinite(batch_loss)) throw TrainingDiverged(step, batch_loss);
        model.backward(batch, cache, config.lambda);

        clip_global_norm(params, config.clip_norm);
        adam_apply(adam, params, config.learning_rate);
        ema_update(shadow, params, config.ema_decay);

        interval_loss += batch_loss;
        interval_count += 1;
        if (step % config.eval_every == 0 || step == config.steps) run_eval(step);
    }

    if (load_ema && config.steps > 0)
        for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = shadow[k];
    return history;
}

}  // namespace crossnet
