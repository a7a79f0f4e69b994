#include "crossnet/gradcheck.hpp"

#include <cmath>
#include <sstream>

#include "crossnet/model.hpp"

namespace crossnet {

void FdReport::merge(const FdReport& other) {
    if (other.max_err > max_err) {
        max_err = other.max_err;
        worst = other.worst;
    }
}

namespace {

double fd_error(double fd, double analytic, double floor) {
    const double denom = std::max(floor, std::max(std::abs(fd), std::abs(analytic)));
    return std::abs(fd - analytic) / denom;
}

}  // namespace

FdReport fd_check_params(const std::vector<Param*>& params, const std::function<double()>& scalar_fn,
                         const FdSettings& settings) {
    FdReport report;
    for (Param* p : params) {
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            double& v = p->value.data()[i];
            const double orig = v;
            v = orig + settings.step;
            const double fp = scalar_fn();
            v = orig - settings.step;
            const double fm = scalar_fn();
            v = orig;
            const double fd = (fp - fm) / (2.0 * settings.step);
            const double err = fd_error(fd, p->grad.data()[i], settings.floor);
            if (err > report.max_err) {
                report.max_err = err;
                report.worst = p->name + "[" + std::to_string(i) + "]";
            }
        }
    }
    return report;
}

FdReport fd_check_vector(Vector& x, const Vector& analytic, const std::function<double()>& scalar_fn,
                         const std::string& label, const FdSettings& settings) {
    FdReport report;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + settings.step;
        const double fp = scalar_fn();
        x[i] = orig - settings.step;
        const double fm = scalar_fn();
        x[i] = orig;
        const double fd = (fp - fm) / (2.0 * settings.step);
        const double err = fd_error(fd, analytic[i], settings.floor);
        if (err > report.max_err) {
            report.max_err = err;
            report.worst = label + "[" + std::to_string(i) + "]";
        }
    }
    return report;
}

namespace {

// Scalar probe for a standalone layer: sum of out (.) u over the batch.
double probe(const Matrix& out, const Vector& u) {
    double acc = 0.0;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) acc += out(r, c) * u[c];
    return acc;
}

Vector random_vec(Rng& rng, std::size_t n) { return sample_uniform(rng, -1.0, 1.0, n); }

template <typename Layer>
FdReport check_cross_like(Layer& layer, std::size_t d, Rng& rng, const std::string& tag) {
    Vector x0v = random_vec(rng, d), xlv = random_vec(rng, d), u = random_vec(rng, d);
    Matrix x0 = row_matrix(x0v), xl = row_matrix(xlv);
    typename Layer::Cache cache;
    for (Param* p : layer.params()) p->zero_grad();
    layer.forward(x0, xl, &cache);
    auto [d_x0, d_xl] = layer.backward(cache, row_matrix(u));

    auto scalar = [&] { return probe(layer.forward(row_matrix(x0v), row_matrix(xlv), nullptr), u); };
    FdReport report = fd_check_params(layer.params(), scalar);
    report.merge(fd_check_vector(x0v, d_x0.row_copy(0), scalar, tag + ".x0"));
    report.merge(fd_check_vector(xlv, d_xl.row_copy(0), scalar, tag + ".xl"));
    return report;
}

FdReport check_dense(Rng& rng, Activation act) {
    const std::size_t in = 2 + rng.below(6), out = 2 + rng.below(6);
    DenseLayer layer(in, out, act);
    layer.init_params(rng);
    for (std::size_t i = 0; i < layer.b.value.size(); ++i) layer.b.value.data()[i] = rng.uniform(-0.5, 0.5);

    // Keep pre-activations away from relu/hard_tanh kinks so the central
    // difference stays valid.
    Vector hv;
    for (int attempt = 0; attempt < 100; ++attempt) {
        hv = random_vec(rng, in);
        DenseLayer::Cache cache;
        layer.forward(row_matrix(hv), &cache);
        bool ok = true;
        for (std::size_t i = 0; i < cache.z.size(); ++i) {
            const double z = cache.z.data()[i];
            if (std::abs(z) < 1e-4 || std::abs(std::abs(z) - 1.0) < 1e-4) ok = false;
        }
        if (ok) break;
    }

    Vector u = random_vec(rng, out);
    DenseLayer::Cache cache;
    for (Param* p : layer.params()) p->zero_grad();
    layer.forward(row_matrix(hv), &cache);
    Matrix d_h = layer.backward(cache, row_matrix(u));

    auto scalar = [&] { return probe(layer.forward(row_matrix(hv), nullptr), u); };
    FdReport report = fd_check_params(layer.params(), scalar);
    report.merge(fd_check_vector(hv, d_h.row_copy(0), scalar, "dense.h"));
    return report;
}

FdReport check_embedding(Rng& rng) {
    std::vector<EmbeddingFeatureSpec> specs{{"f0", 5, 2}, {"f1", 3, 3}};
    EmbeddingLayer layer(specs, 2);
    layer.init_params(rng);

    std::vector<SparseExample> batch(3);
    for (auto& ex : batch) {
        ex.indices.resize(2);
        const std::size_t m = 1 + rng.below(3);  // multivalent on f0
        for (std::size_t i = 0; i < m; ++i) ex.indices[0].push_back(static_cast<std::uint32_t>(rng.below(5)));
        ex.indices[1].push_back(static_cast<std::uint32_t>(rng.below(3)));
        ex.dense = random_vec(rng, 2);
    }
    Vector u = random_vec(rng, layer.output_dim());

    for (Param* p : layer.params()) p->zero_grad();
    Matrix d_x0(batch.size(), layer.output_dim());
    for (std::size_t r = 0; r < batch.size(); ++r)
        for (std::size_t c = 0; c < layer.output_dim(); ++c) d_x0(r, c) = u[c];
    layer.backward_batch(batch, d_x0);

    auto scalar = [&] { return probe(layer.forward_batch(batch), u); };
    return fd_check_params(layer.params(), scalar);
}

FdReport check_model(Rng& rng, StructureKind structure, CrossKind kind, Task task, bool with_embedding,
                     Activation deep_act) {
    ModelSpec spec;
    spec.structure = structure;
    spec.task = task;
    spec.deep_activation = deep_act;

    if (with_embedding) {
        spec.has_embedding = true;
        spec.embed_features = {{"a", 4, 2}, {"b", 3, 2}};
        spec.dense_features = 2;
        spec.input_dim = 6;
    } else {
        spec.input_dim = 4 + rng.below(3);
    }

    const std::size_t n_cross = structure == StructureKind::dnn_only ? 0 : 1 + rng.below(3);
    for (std::size_t i = 0; i < n_cross; ++i) {
        CrossLayerSpec cl;
        cl.kind = kind;
        cl.rank = 1 + rng.below(3);
        cl.experts = 1 + rng.below(3);
        cl.gate = rng.below(2) == 0 ? GateMode::softmax : GateMode::sigmoid;
        cl.with_c = rng.below(2) == 0;
        cl.expert_activation = rng.below(2) == 0 ? Activation::tanh : Activation::sigmoid;
        spec.cross_layers.push_back(cl);
    }
    if (structure != StructureKind::cross_only) {
        spec.deep_sizes = {3 + rng.below(3)};
        if (rng.below(2) == 0) spec.deep_sizes.push_back(2 + rng.below(3));
    }

    Model model(spec);
    Rng init_rng = rng.split();
    model.init_params(init_rng);

    Batch batch;
    const std::size_t n = 3;
    if (with_embedding) {
        batch.examples.resize(n);
        for (auto& ex : batch.examples) {
            ex.indices.resize(2);
            ex.indices[0].push_back(static_cast<std::uint32_t>(rng.below(4)));
            const std::size_t m = 1 + rng.below(2);
            for (std::size_t i = 0; i < m; ++i)
                ex.indices[1].push_back(static_cast<std::uint32_t>(rng.below(3)));
            ex.dense = random_vec(rng, 2);
        }
    } else {
        batch.x = Matrix(n, spec.input_dim);
        for (std::size_t i = 0; i < batch.x.size(); ++i) batch.x.data()[i] = rng.uniform(-1.0, 1.0);
    }
    batch.labels.resize(n);
    for (auto& y : batch.labels)
        y = task == Task::binary_logloss ? static_cast<double>(rng.below(2)) : rng.uniform(-1.0, 1.0);

    const double lambda = 3e-3;
    model.zero_grad();
    Model::ForwardCache cache;
    model.forward(batch, &cache);
    model.backward(batch, cache, lambda);

    auto scalar = [&] { return model.evaluate_loss(batch, lambda); };
    // Multi-layer compositions accumulate enough roundoff that a 1e-6
    // quotient is noise-limited; 1e-5 balances truncation against it.
    return fd_check_params(model.params(), scalar, {1e-5, 1e-2});
}

}  // namespace

GradCheckSummary run_gradient_suite(std::uint64_t seed, std::size_t instances, double tol) {
    Rng root(seed);
    GradCheckSummary summary;

    auto run_group = [&](const std::string& name, const std::function<FdReport(Rng&)>& one) {
        FdReport group;
        for (std::size_t i = 0; i < instances; ++i) {
            Rng rng = root.split();
            group.merge(one(rng));
            ++summary.checks_run;
        }
        std::ostringstream line;
        line << (group.passed(tol) ? "ok  " : "FAIL") << " " << name << "  max_err=" << group.max_err
             << (group.worst.empty() ? "" : "  worst=" + group.worst);
        summary.lines.push_back(line.str());
        summary.report.merge(group);
    };

    run_group("layer/cross", [&](Rng& rng) {
        const std::size_t d = 2 + rng.below(7);
        CrossLayer layer(d, rng.below(4) != 0, rng.below(4) != 0);
        layer.init_params(rng);
        for (std::size_t i = 0; i < d; ++i) layer.b.value(0, i) = rng.uniform(-0.5, 0.5);
        return check_cross_like(layer, d, rng, "cross");
    });
    run_group("layer/dcnv1", [&](Rng& rng) {
        const std::size_t d = 2 + rng.below(7);
        Dcnv1Layer layer(d);
        layer.init_params(rng);
        for (std::size_t i = 0; i < d; ++i) layer.b.value(0, i) = rng.uniform(-0.5, 0.5);
        return check_cross_like(layer, d, rng, "dcnv1");
    });
    run_group("layer/lowrank", [&](Rng& rng) {
        const std::size_t d = 2 + rng.below(7);
        LowRankCrossLayer layer(d, 1 + rng.below(d));
        layer.init_params(rng);
        for (std::size_t i = 0; i < d; ++i) layer.b.value(0, i) = rng.uniform(-0.5, 0.5);
        return check_cross_like(layer, d, rng, "lowrank");
    });
    run_group("layer/mixture", [&](Rng& rng) {
        const std::size_t d = 3 + rng.below(6);
        const std::size_t k = 1 + rng.below(3);
        const GateMode gate =
            rng.below(3) == 0 ? GateMode::softmax : (rng.below(2) == 0 ? GateMode::sigmoid : GateMode::constant_one);
        MixtureCrossLayer layer(d, k, 1 + rng.below(3), gate, /*with_c=*/false,
                                rng.below(2) == 0 ? Activation::tanh : Activation::identity);
        layer.init_params(rng);
        return check_cross_like(layer, d, rng, "mixture");
    });
    run_group("layer/mixture_c", [&](Rng& rng) {
        const std::size_t d = 3 + rng.below(6);
        MixtureCrossLayer layer(d, 1 + rng.below(3), 1 + rng.below(3), GateMode::softmax, /*with_c=*/true,
                                rng.below(2) == 0 ? Activation::tanh : Activation::sigmoid);
        layer.init_params(rng);
        return check_cross_like(layer, d, rng, "mixture_c");
    });
    run_group("layer/dense_relu", [&](Rng& rng) { return check_dense(rng, Activation::relu); });
    run_group("layer/dense_hard_tanh", [&](Rng& rng) { return check_dense(rng, Activation::hard_tanh); });
    run_group("layer/embedding", [&](Rng& rng) { return check_embedding(rng); });

    const std::pair<StructureKind, const char*> structures[] = {
        {StructureKind::cross_only, "cross_only"},
        {StructureKind::stacked, "stacked"},
        {StructureKind::parallel, "parallel"},
    };
    const std::pair<CrossKind, const char*> kinds[] = {
        {CrossKind::full, "full"},
        {CrossKind::lowrank, "lowrank"},
        {CrossKind::mixture, "mixture"},
    };
    for (const auto& [structure, sname] : structures) {
        for (const auto& [kind, kname] : kinds) {
            const std::string name = std::string("model/") + sname + "/" + kname;
            run_group(name, [&, structure = structure, kind = kind](Rng& rng) {
                const Task task = rng.below(2) == 0 ? Task::regression_mse : Task::binary_logloss;
                return check_model(rng, structure, kind, task, /*with_embedding=*/false, Activation::tanh);
            });
        }
    }
    run_group("model/dnn_only", [&](Rng& rng) {
        return check_model(rng, StructureKind::dnn_only, CrossKind::full,
                           rng.below(2) == 0 ? Task::regression_mse : Task::binary_logloss,
                           /*with_embedding=*/false, Activation::tanh);
    });
    run_group("model/stacked_embedding", [&](Rng& rng) {
        return check_model(rng, StructureKind::stacked, CrossKind::full, Task::binary_logloss,
                           /*with_embedding=*/true, Activation::tanh);
    });

    return summary;
}

}  // namespace crossnet
