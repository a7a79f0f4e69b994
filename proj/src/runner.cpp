#include "crossnet/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "crossnet/checkpoint.hpp"
#include "crossnet/gradcheck.hpp"
#include "crossnet/oracle_suite.hpp"
#include "crossnet/analysis.hpp"
#include "crossnet/polyoracle.hpp"
#include "crossnet/synthdata.hpp"
#include "crossnet/tabular.hpp"

namespace crossnet {

namespace fs = std::filesystem;

PolynomialSpec synthetic_by_name(const std::string& name, std::uint64_t data_seed) {
    if (name == "f1") return make_f1();
    if (name == "f2") return make_f2();
    if (name == "f3") return make_f3(data_seed);
    if (name == "homogeneous3") return make_homogeneous(3, 20, 50, data_seed);
    if (name == "homogeneous4") return make_homogeneous(4, 20, 50, data_seed);
    if (name == "combined") return make_combined(data_seed);
    throw std::invalid_argument("unknown synthetic dataset: " + name);
}

void default_sample_counts(const PolynomialSpec& spec, std::size_t& train_n, std::size_t& test_n) {
    if (train_n == 0) train_n = spec.dim <= 50 ? 100000 : 500000;
    if (test_n == 0) test_n = spec.dim <= 50 ? 20000 : 50000;
}

Dataset to_dataset(const SyntheticDataset& synth) {
    Dataset d;
    d.x = synth.inputs;
    d.labels = synth.targets;
    return d;
}

namespace {

void write_metrics_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(17);
    os << "step,split,loss,metric,seconds\n";
    for (const auto& rec : history.records) {
        const double secs = std::round(rec.seconds * 1000.0) / 1000.0;
        os << rec.step << ",train," << rec.train_loss << ',' << rec.train_loss << ',' << secs << '\n';
        os << rec.step << ",eval," << rec.eval_loss << ',' << rec.eval_metric << ',' << secs << '\n';
    }
}

void write_summary_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(17);
    os << "run,seed,final_loss,final_metric,metric_stddev\n";
    for (std::size_t i = 0; i < result.runs.size(); ++i)
        os << i << ',' << result.runs[i].seed << ',' << result.runs[i].final_loss << ','
           << result.runs[i].final_metric << ",\n";
    os << "mean,," << std::accumulate(result.runs.begin(), result.runs.end(), 0.0,
                                      [](double acc, const RunOutcome& r) { return acc + r.final_loss; }) /
                          static_cast<double>(result.runs.size())
       << ',' << result.metric_mean << ',' << result.metric_stddev << '\n';
}

void finalize_stats(ExperimentResult& result) {
    const double n = static_cast<double>(result.runs.size());
    double mean = 0.0;
    for (const auto& r : result.runs) mean += r.final_metric;
    mean /= n;
    double var = 0.0;
    for (const auto& r : result.runs) var += (r.final_metric - mean) * (r.final_metric - mean);
    result.metric_mean = mean;
    result.metric_stddev = result.runs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
}

ModelSpec model_spec_from_config(const ExperimentConfig& config, std::size_t input_dim) {
    ModelSpec spec;
    spec.structure = config.structure;
    spec.task = config.task;
    spec.input_dim = input_dim;
    spec.cross_layers = config.cross_layer_specs();
    spec.deep_sizes = config.deep_sizes;
    spec.deep_activation = config.deep_activation;
    spec.head_bias = config.head_bias;
    return spec;
}

int run_synth_fit(const ExperimentConfig& config, std::ostream& log, ExperimentResult& result) {
    const PolynomialSpec target = synthetic_by_name(config.dataset, config.data_seed);
    std::size_t train_n = config.train_samples, test_n = config.test_samples;
    default_sample_counts(target, train_n, test_n);
    const double split = static_cast<double>(train_n) / static_cast<double>(train_n + test_n);
    const auto [train_synth, test_synth] = sample_dataset(target, train_n + test_n, config.data_seed, split);
    const Dataset train_ds = to_dataset(train_synth);
    const Dataset test_ds = to_dataset(test_synth);
    log << "dataset " << target.name << ": d=" << target.dim << " train=" << train_ds.size()
        << " test=" << test_ds.size() << "\n";

    for (std::size_t run = 0; run < config.repeats; ++run) {
        const std::uint64_t run_seed = config.seed + run;
        Model model(model_spec_from_config(config, target.dim));
        Rng init_rng(run_seed);
        model.init_params(init_rng);
        const TrainHistory history = train(model, train_ds, test_ds, config.train_config(run_seed));
        const EvalRecord& last = history.final_record();
        result.runs.push_back({run_seed, last.eval_loss, last.eval_metric});
        log << "run " << run << " seed " << run_seed << ": eval_loss=" << last.eval_loss
            << " metric=" << last.eval_metric << " params=" << model.param_count() << "\n";
        write_metrics_csv(history, config.out_dir + "/metrics_r" + std::to_string(run) + ".csv");
        save_checkpoint(model, config.out_dir + "/model_r" + std::to_string(run) + ".ckpt");
    }
    finalize_stats(result);
    write_summary_csv(result, config.out_dir + "/summary.csv");
    log << "metric mean=" << result.metric_mean << " stddev=" << result.metric_stddev << "\n";
    return kExitOk;
}

int run_train(const ExperimentConfig& config, std::ostream& log, ExperimentResult& result) {
    TabularData data = load_tabular_csv(config.csv_path, config.schema, config.task);
    log << "csv " << config.csv_path << ": " << data.dataset.size() << " rows, "
        << data.categorical_names.size() << " categorical, " << data.dense_names.size() << " dense\n";

    // Embedding sizes: fixed width when embed_dim is set, rule-of-thumb otherwise.
    std::vector<EmbeddingFeatureSpec> feats;
    for (std::size_t i = 0; i < data.vocabs.size(); ++i) {
        EmbeddingFeatureSpec f;
        f.name = data.categorical_names[i];
        f.vocab = data.vocabs[i].size();
        f.embed_dim = config.embed_dim > 0 ? config.embed_dim : embed_size_rule(f.vocab);
        feats.push_back(std::move(f));
    }

    // Deterministic shuffled split.
    std::vector<std::size_t> order(data.dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng(config.data_seed);
    split_rng.shuffle(order);
    const std::size_t n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                     static_cast<double>(order.size()) * config.split_fraction)));
    if (n_train >= order.size()) throw std::invalid_argument("split leaves no eval rows");
    Dataset train_ds, eval_ds;
    for (std::size_t i = 0; i < order.size(); ++i) {
        Dataset& dst = i < n_train ? train_ds : eval_ds;
        dst.examples.push_back(data.dataset.examples[order[i]]);
        dst.labels.push_back(data.dataset.labels[order[i]]);
    }

    ModelSpec spec;
    spec.structure = config.structure;
    spec.task = config.task;
    spec.cross_layers = config.cross_layer_specs();
    spec.deep_sizes = config.deep_sizes;
    spec.deep_activation = config.deep_activation;
    spec.head_bias = config.head_bias;
    spec.has_embedding = true;
    spec.embed_features = feats;
    spec.dense_features = data.dense_names.size();
    spec.input_dim = spec.dense_features;
    for (const auto& f : feats) spec.input_dim += f.embed_dim;

    // Persist the fitted vocabularies.
    {
        std::ofstream os(config.out_dir + "/vocabs.csv");
        if (!os) throw std::runtime_error("cannot write vocabs.csv");
        os << "column,index,token\n";
        for (const auto& v : data.vocabs) {
            if (v.open) os << v.column << ",0,<oov>\n";
            for (std::size_t i = 0; i < v.tokens.size(); ++i)
                os << v.column << ',' << (i + (v.open ? 1 : 0)) << ',' << v.tokens[i] << '\n';
        }
    }

    for (std::size_t run = 0; run < config.repeats; ++run) {
        const std::uint64_t run_seed = config.seed + run;
        Model model(spec);
        Rng init_rng(run_seed);
        model.init_params(init_rng);
        const TrainHistory history = train(model, train_ds, eval_ds, config.train_config(run_seed));
        const EvalRecord& last = history.final_record();
        result.runs.push_back({run_seed, last.eval_loss, last.eval_metric});
        log << "run " << run << " seed " << run_seed << ": eval_loss=" << last.eval_loss
            << " metric=" << last.eval_metric << " params=" << model.param_count() << "\n";
        write_metrics_csv(history, config.out_dir + "/metrics_r" + std::to_string(run) + ".csv");
        save_checkpoint(model, config.out_dir + "/model_r" + std::to_string(run) + ".ckpt");
    }
    finalize_stats(result);
    write_summary_csv(result, config.out_dir + "/summary.csv");
    log << "metric mean=" << result.metric_mean << " stddev=" << result.metric_stddev << "\n";
    return kExitOk;
}

int run_analyze(const ExperimentConfig& config, std::ostream& log) {
    Model model = load_checkpoint(config.checkpoint);

    FeaturePartition partition;
    std::vector<std::string> names;
    if (!config.feature_blocks.empty()) {
        partition = parse_feature_blocks(config.feature_blocks, &names);
    } else if (model.spec().has_embedding) {
        std::vector<std::size_t> sizes;
        for (const auto& f : model.spec().embed_features) {
            sizes.push_back(f.embed_dim);
            names.push_back(f.name);
        }
        for (std::size_t i = 0; i < model.spec().dense_features; ++i) {
            sizes.push_back(1);
            names.push_back("dense" + std::to_string(i));
        }
        partition = FeaturePartition(sizes);
    } else {
        std::vector<std::size_t> sizes(model.spec().input_dim, 1);
        partition = FeaturePartition(sizes);
    }
    if (partition.total_dim() != model.spec().input_dim)
        throw std::invalid_argument("feature blocks sum to " + std::to_string(partition.total_dim()) +
                                    " but the model input dim is " + std::to_string(model.spec().input_dim));

    std::size_t analyzed = 0;
    const auto& stack = model.cross_stack();
    for (std::size_t i = 0; i < stack.size(); ++i) {
        const CrossLayer* layer = std::get_if<CrossLayer>(&stack[i]);
        if (layer == nullptr) continue;
        const SpectrumReport report = spectrum(layer->W.value);
        write_spectrum_csv(report, config.out_dir + "/spectrum_l" + std::to_string(i) + ".csv");
        const BlockNormMap map = block_norms(layer->W.value, partition, names);
        write_block_norm_csv(map, config.out_dir + "/block_norms_l" + std::to_string(i) + ".csv");
        const std::size_t rank = numerical_rank(report, config.rank_tolerance);
        log << "layer " << i << ": d=" << layer->dim << " numerical_rank(T=" << config.rank_tolerance
            << ")=" << rank << (report.degenerate ? " (degenerate)" : "") << "\n";
        ++analyzed;
    }
    if (analyzed == 0) {
        log << "checkpoint has no full-rank cross layers to analyze\n";
        return kExitConfigInvalid;
    }
    return kExitOk;
}

int run_gradcheck(const ExperimentConfig& config, std::ostream& log) {
    const GradCheckSummary summary = run_gradient_suite(config.seed);
    std::ofstream os(config.out_dir + "/gradcheck.txt");
    for (const auto& line : summary.lines) {
        log << line << "\n";
        if (os) os << line << '\n';
    }
    log << "max_err=" << summary.report.max_err << " over " << summary.checks_run << " instances\n";
    return summary.report.passed(1e-5) ? kExitOk : kExitCheckFailed;
}

int run_oracle(const ExperimentConfig& config, std::ostream& log) {
    const OracleSuiteSummary summary = run_oracle_suite(config.seed);
    std::ofstream os(config.out_dir + "/oracle.txt");
    for (const auto& line : summary.lines) {
        log << line << "\n";
        if (os) os << line << '\n';
    }

    // Dump a sample expansion in the one-term-per-line format.
    Rng rng(config.seed);
    CrossNetVariant variant;
    variant.use_bias = true;
    variant.use_residual = true;
    for (int layer = 0; layer < 2; ++layer) {
        Matrix w(3, 3);
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1.0, 1.0);
        variant.weights.push_back(std::move(w));
        variant.biases.push_back(sample_uniform(rng, -1.0, 1.0, 3));
    }
    std::ofstream dump(config.out_dir + "/expansion_sum.txt");
    if (dump) dump_polynomial(expand_crossnet(variant).sum, dump);

    return summary.passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
    ExperimentResult result;
    try {
        config.validate();
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        result.exit_code = kExitConfigInvalid;
        return result;
    }
    try {
        std::error_code ec;
        fs::create_directories(config.out_dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + config.out_dir);
        std::ofstream cfg(config.out_dir + "/config.txt");
        if (!cfg) throw std::runtime_error("cannot write into output directory " + config.out_dir);
        cfg << serialize_config(config);

        switch (config.experiment) {
            case ExperimentKind::synth_fit: result.exit_code = run_synth_fit(config, log, result); break;
            case ExperimentKind::train: result.exit_code = run_train(config, log, result); break;
            case ExperimentKind::gradcheck: result.exit_code = run_gradcheck(config, log); break;
            case ExperimentKind::oracle: result.exit_code = run_oracle(config, log); break;
            case ExperimentKind::analyze: result.exit_code = run_analyze(config, log); break;
        }
    } catch (const TrainingDiverged& e) {
        log << "diverged: " << e.what() << "\n";
        result.exit_code = kExitDiverged;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        result.exit_code = kExitConfigInvalid;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        result.exit_code = kExitIoFailure;
    }
    return result;
}

}  // namespace crossnet
