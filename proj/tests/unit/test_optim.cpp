#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "crossnet/optim.hpp"

using namespace crossnet;

namespace {

Param make_param(const std::string& name, std::size_t n, double fill) {
    Param p(name, 1, n);
    p.value.fill(fill);
    return p;
}

void set_grads(std::vector<Param*>& params, double g) {
    for (Param* p : params) p->grad.fill(g);
}

double global_grad_norm(const std::vector<Param*>& params) {
    double sq = 0.0;
    for (const Param* p : params)
        for (std::size_t i = 0; i < p->grad.size(); ++i) sq += p->grad.data()[i] * p->grad.data()[i];
    return std::sqrt(sq);
}

}  // namespace

TEST_CASE("global-norm clipping") {
    Param a = make_param("a", 8, 0.0), b = make_param("b", 8, 0.0);
    std::vector<Param*> params{&a, &b};

    SUBCASE("norm 20 is halved to exactly 10") {
        set_grads(params, 5.0);  // 16 entries of 5 -> norm 20
        const double pre = clip_global_norm(params, 10.0);
        CHECK(pre == doctest::Approx(20.0).epsilon(1e-12));
        for (std::size_t i = 0; i < 8; ++i) CHECK(a.grad(0, i) == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(global_grad_norm(params) == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("below the threshold nothing changes") {
        set_grads(params, 1.0);  // norm 4
        clip_global_norm(params, 10.0);
        for (std::size_t i = 0; i < 8; ++i) CHECK(a.grad(0, i) == 1.0);
    }
    SUBCASE("zero gradients stay zero") {
        set_grads(params, 0.0);
        CHECK(clip_global_norm(params, 10.0) == 0.0);
        CHECK(global_grad_norm(params) == 0.0);
    }
    SUBCASE("post-clip norm never exceeds the bound") {
        Rng rng(3);
        for (int trial = 0; trial < 50; ++trial) {
            for (Param* p : params)
                for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad.data()[i] = rng.uniform(-9.0, 9.0);
            clip_global_norm(params, 10.0);
            CHECK(global_grad_norm(params) <= 10.0 + 1e-9);
        }
    }
    SUBCASE("non-finite gradients are rejected") {
        set_grads(params, 1.0);
        a.grad(0, 3) = std::nan("");
        CHECK_THROWS_AS(clip_global_norm(params, 10.0), std::invalid_argument);
    }
}

TEST_CASE("adam single-step magnitude") {
    Param p = make_param("p", 4, 1.0);
    std::vector<Param*> params{&p};
    AdamState state(params);
    p.grad.fill(1.0);
    adam_apply(state, params, 1e-3);
    // After bias correction at t=1, mhat = vhat = 1.
    const double expect = 1.0 - 1e-3 / (1.0 + 1e-8);
    for (std::size_t i = 0; i < 4; ++i) CHECK(p.value(0, i) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(state.t == 1);
}

TEST_CASE("adam leaves parameters alone for zero gradients or zero rate") {
    Param p = make_param("p", 4, 0.3);
    std::vector<Param*> params{&p};
    AdamState state(params);
    p.grad.fill(0.0);
    adam_apply(state, params, 1e-2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(p.value(0, i) == 0.3);

    p.grad.fill(2.0);
    adam_apply(state, params, 0.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(p.value(0, i) == 0.3);
}

TEST_CASE("constant gradients drive the step toward lr * sign(g)") {
    Param p = make_param("p", 1, 0.0);
    std::vector<Param*> params{&p};
    AdamState state(params);
    const double lr = 1e-3;
    double prev = 0.0;
    double step = 0.0;
    for (int t = 0; t < 1000; ++t) {
        p.grad.fill(-3.0);
        prev = p.value(0, 0);
        adam_apply(state, params, lr);
        step = p.value(0, 0) - prev;
    }
    CHECK(std::abs(step - lr) / lr < 0.01);  // ascending against a negative gradient
}

TEST_CASE("ema recurrence") {
    Param p = make_param("p", 2, 1.0);
    std::vector<Param*> params{&p};
    std::vector<Matrix> shadow{Matrix(1, 2, 0.0)};
    ema_update(shadow, params, 0.9999);
    CHECK(shadow[0](0, 0) == doctest::Approx(1e-4).epsilon(1e-12));

    shadow[0].fill(1.0);
    ema_update(shadow, params, 0.9999);
    CHECK(shadow[0](0, 0) == 1.0);  // fixed point

    shadow[0].fill(0.0);
    for (int i = 0; i < 200000; ++i) ema_update(shadow, params, 0.9999);
    CHECK(shadow[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));  // geometric convergence
}

namespace {

Model line_model() {
    ModelSpec spec;
    spec.structure = StructureKind::cross_only;
    spec.task = Task::regression_mse;
    spec.input_dim = 1;
    return Model(spec);  // prediction = w * x, one parameter
}

Dataset line_data(std::size_t n, double slope, std::uint64_t seed) {
    Dataset d;
    d.x = Matrix(n, 1);
    d.labels.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        d.x(i, 0) = rng.uniform(-1.0, 1.0);
        d.labels[i] = slope * d.x(i, 0);
    }
    return d;
}

}  // namespace

TEST_CASE("zero steps touch nothing") {
    Model model = line_model();
    Rng rng(1);
    model.init_params(rng);
    const double w0 = model.head().value(0, 0);
    TrainConfig config;
    config.steps = 0;
    config.batch_size = 4;
    const TrainHistory history = train(model, line_data(16, 2.0, 3), line_data(8, 2.0, 4), config);
    CHECK(history.records.empty());
    CHECK(model.head().value(0, 0) == w0);
}

TEST_CASE("least-squares toy: loss strictly decreases over the first 100 steps") {
    Model model = line_model();
    Rng rng(2);
    model.init_params(rng);
    TrainConfig config;
    config.steps = 100;
    config.batch_size = 64;
    config.eval_every = 1;
    config.learning_rate = 1e-3;
    config.seed = 11;
    const Dataset data = line_data(64, 2.0, 5);  // full-batch
    const TrainHistory history = train(model, data, data, config, /*load_ema=*/false);
    REQUIRE(history.records.size() == 100);
    for (std::size_t i = 1; i < history.records.size(); ++i)
        CHECK(history.records[i].train_loss < history.records[i - 1].train_loss);
}

TEST_CASE("same seed reproduces the history bit for bit") {
    TrainConfig config;
    config.steps = 57;
    config.batch_size = 8;
    config.eval_every = 10;
    config.seed = 21;
    const Dataset train_d = line_data(40, 2.0, 6), eval_d = line_data(10, 2.0, 7);

    auto run = [&] {
        Model model = line_model();
        Rng rng(9);
        model.init_params(rng);
        return train(model, train_d, eval_d, config);
    };
    const TrainHistory a = run(), b = run();
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].step == b.records[i].step);
        CHECK(a.records[i].train_loss == b.records[i].train_loss);
        CHECK(a.records[i].eval_loss == b.records[i].eval_loss);
        CHECK(a.records[i].eval_metric == b.records[i].eval_metric);
        CHECK(a.records[i].eval_loss_raw == b.records[i].eval_loss_raw);
    }
}

TEST_CASE("evaluation uses the shadow weights") {
    Model model = line_model();
    Rng rng(3);
    model.init_params(rng);
    TrainConfig config;
    config.steps = 50;
    config.batch_size = 16;
    config.eval_every = 50;
    config.ema_decay = 0.0;  // shadow == raw weights at every step
    const Dataset data = line_data(32, 1.5, 8);
    const TrainHistory history = train(model, data, data, config);
    const EvalRecord& rec = history.final_record();
    CHECK(rec.eval_loss == doctest::Approx(rec.eval_loss_raw).epsilon(1e-12));
}

TEST_CASE("divergence is reported with the step number") {
    Model model = line_model();
    Rng rng(4);
    model.init_params(rng);
    TrainConfig config;
    config.steps = 50;
    config.batch_size = 8;
    config.learning_rate = 1e155;  // overflows the squared error within a few steps
    const Dataset data = line_data(16, 2.0, 9);
    CHECK_THROWS_AS(train(model, data, data, config), TrainingDiverged);
}
