#include <doctest.h>

#include <stdexcept>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "crossnet/checkpoint.hpp"
#include "crossnet/config.hpp"
#include "crossnet/tabular.hpp"

using namespace crossnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("crossnet_io_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    os << content;
}

}  // namespace

TEST_CASE("config parse/serialize normalization is idempotent") {
    const std::string text =
        "# toy experiment\n"
        "experiment = synth-fit\n"
        "dataset = f2\n"
        "train_steps = 123   # inline comment\n"
        "deep_sizes = \n"
        "learning_rate = 0.01\n"
        "cross_gate = sigmoid\n"
        "column.user = categorical open\n"
        "column.price = dense log 1\n"
        "column.y = label\n";
    const ExperimentConfig a = parse_config_text(text);
    CHECK(a.dataset == "f2");
    CHECK(a.train_steps == 123);
    CHECK(a.learning_rate == 0.01);
    CHECK(a.cross_gate == GateMode::sigmoid);
    REQUIRE(a.schema.columns.size() == 3);
    CHECK(a.schema.columns[0].open_vocab);
    CHECK(a.schema.columns[1].log_transform);

    const std::string round = serialize_config(a);
    const ExperimentConfig b = parse_config_text(round);
    CHECK(serialize_config(b) == round);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("nonsense_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("experiment synth-fit\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("train_steps = twelve\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("column.x = dense log\n"), std::invalid_argument);
}

TEST_CASE("config validation catches cross-field mistakes") {
    ExperimentConfig c;
    c.dataset = "mystery";
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    ExperimentConfig lowrank;
    lowrank.cross_kind = CrossKind::lowrank;  // rank left at 0
    CHECK_THROWS_AS(lowrank.validate(), std::invalid_argument);

    ExperimentConfig an;
    an.experiment = ExperimentKind::analyze;
    CHECK_THROWS_AS(an.validate(), std::invalid_argument);  // no checkpoint
}

TEST_CASE("embedding size rule") {
    CHECK(embed_size_rule(10000) == 60);
    CHECK(embed_size_rule(1) == 6);
    CHECK(embed_size_rule(16) == 12);
    CHECK(embed_size_rule(39) >= 1);
    CHECK_THROWS_AS(embed_size_rule(0), std::invalid_argument);
}

TEST_CASE("tabular loading: vocab order, transforms, multivalent cells") {
    TempDir dir;
    const std::string csv = dir.file("toy.csv");
    write_file(csv,
               "user,tags,price,y\n"
               "a,red|blue,0,1\n"
               "b,red,2.5,0\n"
               "a,green|red|blue,1,1\n");
    TabularSchema schema;
    schema.columns = {{"user", ColumnKind::categorical}, {"tags", ColumnKind::multivalent},
                      {"price", ColumnKind::dense, false, true, 1.0}, {"y", ColumnKind::label}};

    const TabularData data = load_tabular_csv(csv, schema, Task::binary_logloss);
    REQUIRE(data.dataset.size() == 3);
    CHECK(data.vocabs[0].tokens == std::vector<std::string>{"a", "b"});
    CHECK(data.dataset.examples[0].indices[0] == std::vector<std::uint32_t>{0});
    CHECK(data.dataset.examples[1].indices[0] == std::vector<std::uint32_t>{1});
    CHECK(data.dataset.examples[2].indices[0] == std::vector<std::uint32_t>{0});
    CHECK(data.dataset.examples[0].indices[1] == std::vector<std::uint32_t>{0, 1});
    CHECK(data.dataset.examples[2].indices[1] == std::vector<std::uint32_t>{2, 0, 1});
    CHECK(data.dataset.examples[0].dense[0] == 0.0);  // log(0 + 1)
    CHECK(data.dataset.labels == Vector{1.0, 0.0, 1.0});

    // Stability: a second read fits the identical mapping.
    const TabularData again = load_tabular_csv(csv, schema, Task::binary_logloss);
    CHECK(again.vocabs[0].tokens == data.vocabs[0].tokens);
    CHECK(again.vocabs[1].tokens == data.vocabs[1].tokens);
}

TEST_CASE("tabular loading errors") {
    TempDir dir;
    const std::string csv = dir.file("toy.csv");
    write_file(csv, "a,y\nfoo,1\n");

    TabularSchema missing;
    missing.columns = {{"b", ColumnKind::categorical}, {"y", ColumnKind::label}};
    CHECK_THROWS_WITH_AS(load_tabular_csv(csv, missing, Task::binary_logloss),
                         doctest::Contains("missing column 'b'"), std::runtime_error);

    write_file(csv, "a,y\n1.5x,1\n");
    TabularSchema dense;
    dense.columns = {{"a", ColumnKind::dense}, {"y", ColumnKind::label}};
    CHECK_THROWS_WITH_AS(load_tabular_csv(csv, dense, Task::binary_logloss),
                         doctest::Contains("unparseable"), std::runtime_error);

    write_file(csv, "a,y\nfoo,2\n");
    TabularSchema cat;
    cat.columns = {{"a", ColumnKind::categorical}, {"y", ColumnKind::label}};
    CHECK_THROWS_WITH_AS(load_tabular_csv(csv, cat, Task::binary_logloss),
                         doctest::Contains("outside binary task range"), std::runtime_error);

    TabularSchema two_labels;
    two_labels.columns = {{"a", ColumnKind::label}, {"y", ColumnKind::label}};
    CHECK_THROWS_AS(load_tabular_csv(csv, two_labels, Task::binary_logloss), std::invalid_argument);
}

TEST_CASE("open vocab reserves index zero for unseen tokens at apply time") {
    TempDir dir;
    const std::string fit_csv = dir.file("fit.csv");
    write_file(fit_csv, "a,y\nfoo,1\nbar,0\n");
    TabularSchema schema;
    schema.columns = {{"a", ColumnKind::categorical, /*open=*/true}, {"y", ColumnKind::label}};
    const TabularData fit = load_tabular_csv(fit_csv, schema, Task::binary_logloss);
    CHECK(fit.vocabs[0].size() == 3);  // oov slot + two tokens
    CHECK(fit.dataset.examples[0].indices[0][0] == 1);

    const std::string apply_csv = dir.file("apply.csv");
    write_file(apply_csv, "a,y\nbaz,1\nfoo,0\n");
    const TabularData applied = load_tabular_csv(apply_csv, schema, Task::binary_logloss, &fit.vocabs);
    CHECK(applied.dataset.examples[0].indices[0][0] == 0);  // unseen -> reserved slot
    CHECK(applied.dataset.examples[1].indices[0][0] == 1);

    // Closed vocabs refuse unseen tokens at apply time.
    TabularSchema closed;
    closed.columns = {{"a", ColumnKind::categorical}, {"y", ColumnKind::label}};
    const TabularData cfit = load_tabular_csv(fit_csv, closed, Task::binary_logloss);
    CHECK_THROWS_WITH_AS(load_tabular_csv(apply_csv, closed, Task::binary_logloss, &cfit.vocabs),
                         doctest::Contains("out-of-vocab"), std::runtime_error);
}

TEST_CASE("declared vocab caps the fitted size") {
    TempDir dir;
    const std::string csv = dir.file("toy.csv");
    write_file(csv, "a,y\nu,1\nv,0\nw,1\n");
    TabularSchema schema;
    schema.columns = {{"a", ColumnKind::categorical, false, false, 1.0, /*declared_vocab=*/2},
                      {"y", ColumnKind::label}};
    CHECK_THROWS_WITH_AS(load_tabular_csv(csv, schema, Task::binary_logloss),
                         doctest::Contains("vocab overflow"), std::runtime_error);
}

TEST_CASE("checkpoint round trip is bit exact") {
    TempDir dir;
    ModelSpec spec;
    spec.structure = StructureKind::parallel;
    spec.task = Task::binary_logloss;
    spec.input_dim = 7;
    CrossLayerSpec mix;
    mix.kind = CrossKind::mixture;
    mix.rank = 2;
    mix.experts = 2;
    mix.with_c = true;
    spec.cross_layers = {CrossLayerSpec{}, mix};
    spec.deep_sizes = {5, 3};
    spec.has_embedding = true;
    spec.embed_features = {{"u", 9, 3}, {"v", 4, 2}};
    spec.dense_features = 2;

    Model model(spec);
    Rng rng(77);
    model.init_params(rng);
    const std::string path = dir.file("model.ckpt");
    save_checkpoint(model, path);

    Model back = load_checkpoint(path);
    const auto a = model.params();
    const auto b = back.params();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i]->name == b[i]->name);
        REQUIRE(a[i]->value.size() == b[i]->value.size());
        for (std::size_t j = 0; j < a[i]->value.size(); ++j)
            CHECK(a[i]->value.data()[j] == b[i]->value.data()[j]);
    }
    CHECK(back.spec().embed_features[0].name == "u");
}

TEST_CASE("mixture checkpoint restores the parameter count exactly") {
    ModelSpec spec;
    spec.structure = StructureKind::cross_only;
    spec.task = Task::regression_mse;
    spec.input_dim = 80;
    CrossLayerSpec mix;
    mix.kind = CrossKind::mixture;
    mix.rank = 64;
    mix.experts = 4;
    spec.cross_layers = {mix};
    Model model(spec);
    Rng rng(5);
    model.init_params(rng);
    TempDir dir;
    const std::string path = dir.file("mix.ckpt");
    save_checkpoint(model, path);
    CHECK(load_checkpoint(path).param_count() == model.param_count());
}

TEST_CASE("corrupt checkpoints are refused") {
    TempDir dir;
    const std::string path = dir.file("bad.ckpt");
    write_file(path, "definitely not a checkpoint");
    CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("not a checkpoint"), std::runtime_error);

    // Valid file, then flip the version field.
    ModelSpec spec;
    spec.structure = StructureKind::cross_only;
    spec.task = Task::regression_mse;
    spec.input_dim = 3;
    spec.cross_layers = {CrossLayerSpec{}};
    Model model(spec);
    Rng rng(6);
    model.init_params(rng);
    save_checkpoint(model, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        const std::uint32_t bogus = 99;
        f.write(reinterpret_cast<const char*>(&bogus), sizeof bogus);
    }
    CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("version"), std::runtime_error);
}

TEST_CASE("a checkpoint whose arrays disagree with its declared shape is refused") {
    TempDir dir;
    const std::string good = dir.file("good.ckpt");
    ModelSpec spec;
    spec.structure = StructureKind::cross_only;
    spec.task = Task::regression_mse;
    spec.input_dim = 4;
    spec.cross_layers = {CrossLayerSpec{}};
    Model model(spec);
    Rng rng(7);
    model.init_params(rng);
    save_checkpoint(model, good);

    // Rewrite the descriptor to claim d=5 while keeping the d=4 arrays.
    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string from = "input_dim = 4";
    const std::string to = "input_dim = 5";
    const auto at = bytes.find(from);
    REQUIRE(at != std::string::npos);
    // Descriptor length is prefixed, so swap in an equal-length string.
    bytes.replace(at, from.size(), to);
    const std::string bad = dir.file("bad_dim.ckpt");
    std::ofstream out(bad, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_WITH_AS(load_checkpoint(bad), doctest::Contains("shape"), std::runtime_error);
}

TEST_CASE("model spec descriptor round trip") {
    ModelSpec spec;
    spec.structure = StructureKind::stacked;
    spec.task = Task::binary_logloss;
    spec.input_dim = 12;
    CrossLayerSpec lr;
    lr.kind = CrossKind::lowrank;
    lr.rank = 3;
    CrossLayerSpec nb;
    nb.use_bias = false;
    nb.use_residual = false;
    spec.cross_layers = {lr, nb};
    spec.deep_sizes = {8, 4};
    spec.deep_activation = Activation::hard_tanh;
    spec.head_bias = true;

    const ModelSpec back = parse_model_spec(serialize_model_spec(spec));
    CHECK(back.structure == spec.structure);
    CHECK(back.input_dim == spec.input_dim);
    CHECK(back.cross_layers.size() == 2);
    CHECK(back.cross_layers[0].kind == CrossKind::lowrank);
    CHECK(back.cross_layers[0].rank == 3);
    CHECK(!back.cross_layers[1].use_bias);
    CHECK(!back.cross_layers[1].use_residual);
    CHECK(back.deep_sizes == spec.deep_sizes);
    CHECK(back.deep_activation == Activation::hard_tanh);
    CHECK(back.head_bias);
}
