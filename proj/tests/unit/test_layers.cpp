#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "crossnet/gradcheck.hpp"
#include "crossnet/layers.hpp"

using namespace crossnet;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST_CASE("cross layer with identity weights") {
    CrossLayer layer(2);
    layer.W.value = Matrix::identity(2);
    const Vector out = cross_forward(layer, {1.0, 2.0}, {1.0, 2.0});
    CHECK(out == Vector{2.0, 6.0});
}

TEST_CASE("cross layer with zero weights passes the input through") {
    CrossLayer layer(3);
    Rng rng(4);
    const Vector x0 = sample_uniform(rng, -1.0, 1.0, 3), xl = sample_uniform(rng, -1.0, 1.0, 3);
    CHECK(cross_forward(layer, x0, xl) == xl);
}

TEST_CASE("rank-1 weight reproduces the first-generation cross layer") {
    // W = 1 w^T with w = [0.5, 0.5]: x0 (x_l . w) + x_l.
    CrossLayer layer(2);
    const Vector w{0.5, 0.5};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) layer.W.value(i, j) = w[j];
    const Vector out = cross_forward(layer, {1.0, 2.0}, {1.0, 2.0});
    CHECK(max_abs_diff(out, {2.5, 5.0}) == 0.0);

    // And the dedicated rank-1 layer agrees with the structured full layer
    // for every input, bias included.
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + rng.below(6);
        Dcnv1Layer v1(d);
        v1.init_params(rng);
        for (std::size_t i = 0; i < d; ++i) v1.b.value(0, i) = rng.uniform(-0.5, 0.5);
        CrossLayer full(d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) full.W.value(i, j) = v1.w.value(0, j);
        full.b.value = v1.b.value;
        const Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
        CHECK(max_abs_diff(cross_forward(full, x0, xl), dcnv1_forward(v1, x0, xl)) < 1e-12);
    }
}

TEST_CASE("cross backward: scalar case and zero upstream") {
    CrossLayer layer(1);
    layer.W.value(0, 0) = 0.7;
    const double x0 = 1.3, xl = -0.4, d_out = 2.0;
    CrossLayer::Cache cache;
    layer.forward(row_matrix({x0}), row_matrix({xl}), &cache);
    layer.backward(cache, row_matrix({d_out}));
    CHECK(layer.W.grad(0, 0) == doctest::Approx(x0 * xl * d_out).epsilon(1e-12));
    CHECK(layer.b.grad(0, 0) == doctest::Approx(x0 * d_out).epsilon(1e-12));

    layer.W.grad.fill(0.0);
    layer.b.grad.fill(0.0);
    auto [d_x0, d_xl] = layer.backward(cache, row_matrix({0.0}));
    CHECK(layer.W.grad(0, 0) == 0.0);
    CHECK(d_x0(0, 0) == 0.0);
    CHECK(d_xl(0, 0) == 0.0);
}

TEST_CASE("cross backward matches finite differences at d=5") {
    Rng rng(21);
    CrossLayer layer(5);
    layer.init_params(rng);
    for (std::size_t i = 0; i < 5; ++i) layer.b.value(0, i) = rng.uniform(-0.5, 0.5);
    Vector x0 = sample_uniform(rng, -1.0, 1.0, 5), xl = sample_uniform(rng, -1.0, 1.0, 5);
    const Vector u = sample_uniform(rng, -1.0, 1.0, 5);

    layer.W.zero_grad();
    layer.b.zero_grad();
    CrossLayer::Cache cache;
    layer.forward(row_matrix(x0), row_matrix(xl), &cache);
    auto [d_x0, d_xl] = layer.backward(cache, row_matrix(u));

    auto scalar = [&] { return dot(cross_forward(layer, x0, xl), u); };
    FdReport report = fd_check_params(layer.params(), scalar);
    report.merge(fd_check_vector(x0, d_x0.row_copy(0), scalar, "x0"));
    report.merge(fd_check_vector(xl, d_xl.row_copy(0), scalar, "xl"));
    CHECK(report.max_err < 1e-5);
}

TEST_CASE("low-rank layer degenerations") {
    Rng rng(9);
    LowRankCrossLayer layer(3, 3);
    layer.U.value = Matrix::identity(3);
    layer.V.value = Matrix::identity(3);
    CrossLayer full(3);
    full.W.value = Matrix::identity(3);
    const Vector x0 = sample_uniform(rng, -1.0, 1.0, 3), xl = sample_uniform(rng, -1.0, 1.0, 3);
    CHECK(max_abs_diff(lowrank_cross_forward(layer, x0, xl), cross_forward(full, x0, xl)) < 1e-15);

    LowRankCrossLayer zero(3, 2);
    zero.V.value = random_matrix(rng, 3, 2);
    CHECK(lowrank_cross_forward(zero, x0, xl) == xl);  // U = 0
}

TEST_CASE("low-rank layer equals the full layer with W = U V^T") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + rng.below(7), r = 1 + rng.below(d);
        LowRankCrossLayer lr(d, r);
        lr.init_params(rng);
        for (std::size_t i = 0; i < d; ++i) lr.b.value(0, i) = rng.uniform(-0.5, 0.5);
        CrossLayer full(d);
        full.b.value = lr.b.value;
        Matrix vt = lr.V.value.transposed();
        full.W.value = matmul(lr.U.value, vt);
        const Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
        CHECK(max_abs_diff(lowrank_cross_forward(lr, x0, xl), cross_forward(full, x0, xl)) < 1e-12);
    }
}

TEST_CASE("K=1 constant-gate mixture is bit-identical to the low-rank layer") {
    Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t d = 2 + rng.below(7), r = 1 + rng.below(d);
        LowRankCrossLayer lr(d, r);
        lr.init_params(rng);
        for (std::size_t i = 0; i < d; ++i) lr.b.value(0, i) = rng.uniform(-0.5, 0.5);

        MixtureCrossLayer mix(d, 1, r, GateMode::constant_one, /*with_c=*/false, Activation::identity);
        mix.experts[0].U.value = lr.U.value;
        mix.experts[0].V.value = lr.V.value;
        mix.experts[0].b.value = lr.b.value;

        const Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
        const Vector a = lowrank_cross_forward(lr, x0, xl);
        const Vector b = mixture_cross_forward(mix, x0, xl);
        for (std::size_t i = 0; i < d; ++i) CHECK(a[i] == b[i]);  // exact, not approximate
    }
}

TEST_CASE("softmax gate: symmetric logits and normalization") {
    Rng rng(66);
    const std::size_t d = 4;
    MixtureCrossLayer mix(d, 2, 2, GateMode::softmax);
    mix.init_params(rng);
    // p_1 == p_2 forces G = [0.5, 0.5] regardless of the input.
    for (std::size_t j = 0; j < d; ++j) mix.gate.value(1, j) = mix.gate.value(0, j);
    const Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
    MixtureCrossLayer::Cache cache;
    mix.forward(row_matrix(x0), row_matrix(xl), &cache);
    CHECK(cache.gates(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cache.gates(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

    // Random gates are nonnegative and sum to one.
    MixtureCrossLayer mix3(d, 3, 2, GateMode::softmax);
    mix3.init_params(rng);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector a = sample_uniform(rng, -3.0, 3.0, d), b = sample_uniform(rng, -3.0, 3.0, d);
        MixtureCrossLayer::Cache c3;
        mix3.forward(row_matrix(a), row_matrix(b), &c3);
        double sum = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(c3.gates(0, i) >= 0.0);
            sum += c3.gates(0, i);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("mixture forward matches a straight-line composition of primitives") {
    Rng rng(77);
    const std::size_t d = 5, k = 2, r = 2;
    MixtureCrossLayer mix(d, k, r, GateMode::softmax, /*with_c=*/true, Activation::tanh);
    mix.init_params(rng);
    for (auto& e : mix.experts)
        for (std::size_t i = 0; i < d; ++i) e.b.value(0, i) = rng.uniform(-0.5, 0.5);

    const Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
    const Vector out = mixture_cross_forward(mix, x0, xl);

    // Re-evaluate the published formula term by term.
    Vector logits(k);
    for (std::size_t i = 0; i < k; ++i) logits[i] = dot(mix.gate.value.row_copy(i), xl);
    double mx = std::max(logits[0], logits[1]);
    Vector gates(k);
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += gates[i] = std::exp(logits[i] - mx);
    for (auto& g : gates) g /= z;

    Vector expect = xl;
    for (std::size_t i = 0; i < k; ++i) {
        Vector t = matvec_t(mix.experts[i].V.value, xl);
        for (auto& v : t) v = std::tanh(v);
        Vector s = matvec(mix.experts[i].C.value, t);
        for (auto& v : s) v = std::tanh(v);
        Vector proj = matvec(mix.experts[i].U.value, s);
        for (std::size_t j = 0; j < d; ++j) proj[j] += mix.experts[i].b.value(0, j);
        const Vector e = hadamard(x0, proj);
        for (std::size_t j = 0; j < d; ++j) expect[j] += gates[i] * e[j];
    }
    CHECK(max_abs_diff(out, expect) < 1e-12);
}

TEST_CASE("constant gate leaves the gate parameters without gradient") {
    Rng rng(88);
    const std::size_t d = 4;
    MixtureCrossLayer mix(d, 2, 2, GateMode::constant_one);
    mix.init_params(rng);
    MixtureCrossLayer::Cache cache;
    mix.forward(row_matrix(sample_uniform(rng, -1.0, 1.0, d)), row_matrix(sample_uniform(rng, -1.0, 1.0, d)),
                &cache);
    mix.backward(cache, row_matrix(sample_uniform(rng, -1.0, 1.0, d)));
    for (std::size_t i = 0; i < mix.gate.grad.size(); ++i) CHECK(mix.gate.grad.data()[i] == 0.0);
}

TEST_CASE("K=1 identity-factor mixture gradients reduce to the full layer's") {
    Rng rng(99);
    const std::size_t d = 4;
    MixtureCrossLayer mix(d, 1, d, GateMode::constant_one, /*with_c=*/false, Activation::identity);
    mix.experts[0].U.value = Matrix::identity(d);
    mix.experts[0].V.value = Matrix::identity(d);
    for (std::size_t i = 0; i < d; ++i) mix.experts[0].b.value(0, i) = rng.uniform(-0.5, 0.5);

    CrossLayer full(d);
    full.W.value = Matrix::identity(d);
    full.b.value = mix.experts[0].b.value;

    const Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
    const Vector u = sample_uniform(rng, -1.0, 1.0, d);

    MixtureCrossLayer::Cache mc;
    mix.forward(row_matrix(x0), row_matrix(xl), &mc);
    auto [m_dx0, m_dxl] = mix.backward(mc, row_matrix(u));

    CrossLayer::Cache fc;
    full.forward(row_matrix(x0), row_matrix(xl), &fc);
    auto [f_dx0, f_dxl] = full.backward(fc, row_matrix(u));

    // With U = V = I: dU == dW and dV == dW^T; inputs see the same gradient.
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(mix.experts[0].U.grad(i, j) == doctest::Approx(full.W.grad(i, j)).epsilon(1e-12));
            CHECK(mix.experts[0].V.grad(i, j) == doctest::Approx(full.W.grad(j, i)).epsilon(1e-12));
        }
    CHECK(max_abs_diff(m_dx0.row_copy(0), f_dx0.row_copy(0)) < 1e-12);
    CHECK(max_abs_diff(m_dxl.row_copy(0), f_dxl.row_copy(0)) < 1e-12);
    CHECK(max_abs_diff(mix.experts[0].b.grad.row_copy(0), full.b.grad.row_copy(0)) < 1e-12);
}

TEST_CASE("mixture with C and tanh passes finite differences") {
    Rng rng(111);
    const std::size_t d = 6;
    MixtureCrossLayer mix(d, 3, 2, GateMode::softmax, /*with_c=*/true, Activation::tanh);
    mix.init_params(rng);
    Vector x0 = sample_uniform(rng, -1.0, 1.0, d), xl = sample_uniform(rng, -1.0, 1.0, d);
    const Vector u = sample_uniform(rng, -1.0, 1.0, d);

    for (Param* p : mix.params()) p->zero_grad();
    MixtureCrossLayer::Cache cache;
    mix.forward(row_matrix(x0), row_matrix(xl), &cache);
    auto [d_x0, d_xl] = mix.backward(cache, row_matrix(u));

    auto scalar = [&] { return dot(mixture_cross_forward(mix, x0, xl), u); };
    FdReport report = fd_check_params(mix.params(), scalar);
    report.merge(fd_check_vector(x0, d_x0.row_copy(0), scalar, "x0"));
    report.merge(fd_check_vector(xl, d_xl.row_copy(0), scalar, "xl"));
    CHECK(report.max_err < 1e-5);
}

TEST_CASE("dense layer activations") {
    DenseLayer relu(2, 2, Activation::relu);
    relu.W.value = Matrix::identity(2);
    CHECK(dense_forward(relu, {-1.0, 2.0}) == Vector{0.0, 2.0});

    DenseLayer ht(3, 3, Activation::hard_tanh);
    ht.W.value = Matrix::identity(3);
    CHECK(dense_forward(ht, {-3.0, 0.5, 3.0}) == Vector{-1.0, 0.5, 1.0});
}

TEST_CASE("embedding lookups") {
    EmbeddingLayer layer({{"f", 2, 1}}, 0);
    layer.tables[0].value(0, 0) = 0.5;
    layer.tables[0].value(0, 1) = -0.5;

    SparseExample ex;
    ex.indices = {{0}};
    CHECK(layer.forward(ex) == Vector{0.5});

    ex.indices = {{0, 1}};
    CHECK(layer.forward(ex) == Vector{0.0});  // mean of 0.5 and -0.5

    ex.indices = {{2}};
    CHECK_THROWS_WITH_AS(layer.forward(ex), doctest::Contains("index 2"), std::invalid_argument);

    EmbeddingLayer wide({{"a", 3, 2}, {"b", 4, 3}}, 1);
    CHECK(wide.output_dim() == 6);
    SparseExample ex2;
    ex2.indices = {{1}, {2}};
    ex2.dense = {0.25};
    CHECK(wide.forward(ex2).size() == 6);
}

TEST_CASE("embedding backward splits multivalent gradients evenly") {
    EmbeddingLayer layer({{"f", 3, 2}}, 0);
    Rng rng(7);
    layer.init_params(rng);
    SparseExample ex;
    ex.indices = {{0, 2}};
    Matrix d_x0(1, 2);
    d_x0(0, 0) = 1.0;
    d_x0(0, 1) = -2.0;
    layer.backward_batch({ex}, d_x0);
    CHECK(layer.tables[0].grad(0, 0) == doctest::Approx(0.5));
    CHECK(layer.tables[0].grad(1, 0) == doctest::Approx(-1.0));
    CHECK(layer.tables[0].grad(0, 2) == doctest::Approx(0.5));
    CHECK(layer.tables[0].grad(1, 2) == doctest::Approx(-1.0));
    CHECK(layer.tables[0].grad(0, 1) == 0.0);
}

TEST_CASE("he-normal init: zero biases, bounded entries, plausible spread") {
    Rng rng(64);
    CrossLayer layer(64);
    layer.b.value.fill(7.0);
    layer.init_params(rng);
    for (std::size_t i = 0; i < 64; ++i) CHECK(layer.b.value(0, i) == 0.0);

    const double target = std::sqrt(2.0 / 64.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < layer.W.value.size(); ++i) mean += layer.W.value.data()[i];
    mean /= static_cast<double>(layer.W.value.size());
    double var = 0.0;
    for (std::size_t i = 0; i < layer.W.value.size(); ++i) {
        const double x = layer.W.value.data()[i];
        CHECK(std::abs(x) <= 2.0 * target);
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(layer.W.value.size());
    CHECK(std::abs(std::sqrt(var) - target) / target < 0.15);
}

TEST_CASE("parameter counts") {
    CHECK(CrossLayer(4).param_count() == 20);
    CHECK(Dcnv1Layer(4).param_count() == 8);
    CHECK(LowRankCrossLayer(100, 10).param_count() == 2100);
    CHECK(MixtureCrossLayer(8, 3, 2, GateMode::softmax).param_count() == 3 * (2 * 8 * 2 + 8 + 8));
    CHECK(MixtureCrossLayer(8, 2, 3, GateMode::softmax, true).param_count() == 2 * (2 * 8 * 3 + 8 + 8 + 9));
    CHECK(DenseLayer(5, 7).param_count() == 42);
    for (std::size_t d = 1; d <= 128; ++d) CHECK(CrossLayer(d).param_count() == d * d + d);
}
