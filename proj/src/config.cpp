#include "crossnet/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossnet {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::synth_fit: return "synth-fit";
        case ExperimentKind::train: return "train";
        case ExperimentKind::gradcheck: return "gradcheck";
        case ExperimentKind::oracle: return "oracle";
        case ExperimentKind::analyze: return "analyze";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "synth-fit") return ExperimentKind::synth_fit;
    if (s == "train") return ExperimentKind::train;
    if (s == "gradcheck") return ExperimentKind::gradcheck;
    if (s == "oracle") return ExperimentKind::oracle;
    if (s == "analyze") return ExperimentKind::analyze;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

std::string to_string(ColumnKind k) {
    switch (k) {
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::multivalent: return "multivalent";
        case ColumnKind::dense: return "dense";
        case ColumnKind::label: return "label";
    }
    return "?";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "multivalent") return ColumnKind::multivalent;
    if (s == "dense") return ColumnKind::dense;
    if (s == "label") return ColumnKind::label;
    throw std::invalid_argument("unknown column kind: " + s);
}

void TabularSchema::validate() const {
    std::size_t labels = 0, features = 0;
    for (const auto& c : columns) {
        if (c.name.empty()) throw std::invalid_argument("schema: empty column name");
        if (c.kind == ColumnKind::label)
            ++labels;
        else
            ++features;
    }
    if (labels != 1) throw std::invalid_argument("schema: need exactly one label column");
    if (features == 0) throw std::invalid_argument("schema: need at least one feature column");
}

const ColumnSpec* TabularSchema::find(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("expected boolean, got '" + s + "'");
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("expected number, got '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("expected integer, got '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

// "categorical [open] [vocab <n>]" | "multivalent ..." | "dense [log <c>]" | "label"
ColumnSpec parse_column_value(const std::string& name, const std::string& value) {
    ColumnSpec spec;
    spec.name = name;
    std::stringstream ss(value);
    std::string word;
    if (!(ss >> word)) throw std::invalid_argument("column " + name + ": empty spec");
    spec.kind = column_kind_from_string(word);
    while (ss >> word) {
        if (word == "open" && (spec.kind == ColumnKind::categorical || spec.kind == ColumnKind::multivalent)) {
            spec.open_vocab = true;
        } else if (word == "vocab" &&
                   (spec.kind == ColumnKind::categorical || spec.kind == ColumnKind::multivalent)) {
            std::string n;
            if (!(ss >> n)) throw std::invalid_argument("column " + name + ": vocab needs a size");
            spec.declared_vocab = parse_u64(n);
        } else if (word == "log" && spec.kind == ColumnKind::dense) {
            std::string c;
            if (!(ss >> c)) throw std::invalid_argument("column " + name + ": log needs a shift");
            spec.log_transform = true;
            spec.log_shift = parse_double(c);
        } else {
            throw std::invalid_argument("column " + name + ": unexpected token '" + word + "'");
        }
    }
    return spec;
}

std::string column_value_string(const ColumnSpec& c) {
    std::string v = to_string(c.kind);
    if (c.open_vocab) v += " open";
    if (c.declared_vocab > 0) v += " vocab " + std::to_string(c.declared_vocab);
    if (c.log_transform) {
        std::ostringstream os;
        os.precision(17);
        os << " log " << c.log_shift;
        v += os.str();
    }
    return v;
}

std::string size_list_string(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

std::string double_string(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& s) {
    std::vector<std::size_t> out;
    if (trim(s).empty()) return out;
    for (const auto& part : split(s, ',')) out.push_back(parse_u64(trim(part)));
    return out;
}

FeaturePartition parse_feature_blocks(const std::string& s, std::vector<std::string>* names) {
    std::vector<std::size_t> sizes;
    if (names != nullptr) names->clear();
    for (const auto& part : split(s, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("feature_blocks: expected name:size, got '" + part + "'");
        if (names != nullptr) names->push_back(trim(part.substr(0, colon)));
        sizes.push_back(parse_u64(trim(part.substr(colon + 1))));
    }
    return FeaturePartition(sizes);
}

void apply_config_line(ExperimentConfig& c, const std::string& raw) {
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected 'key = value' in '" + raw + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key.rfind("column.", 0) == 0) {
        const std::string name = key.substr(7);
        ColumnSpec spec = parse_column_value(name, value);
        for (auto& existing : c.schema.columns) {
            if (existing.name == name) {
                existing = spec;
                return;
            }
        }
        c.schema.columns.push_back(std::move(spec));
        return;
    }

    if (key == "experiment") c.experiment = experiment_kind_from_string(value);
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "seed") c.seed = parse_u64(value);
    else if (key == "repeats") c.repeats = parse_u64(value);
    else if (key == "dataset") c.dataset = value;
    else if (key == "data_seed") c.data_seed = parse_u64(value);
    else if (key == "train_samples") c.train_samples = parse_u64(value);
    else if (key == "test_samples") c.test_samples = parse_u64(value);
    else if (key == "split_fraction") c.split_fraction = parse_double(value);
    else if (key == "csv_path") c.csv_path = value;
    else if (key == "task") c.task = task_from_string(value);
    else if (key == "structure") c.structure = structure_from_string(value);
    else if (key == "cross_kind") c.cross_kind = cross_kind_from_string(value);
    else if (key == "cross_layers") c.cross_layers = parse_u64(value);
    else if (key == "cross_rank") c.cross_rank = parse_u64(value);
    else if (key == "cross_experts") c.cross_experts = parse_u64(value);
    else if (key == "cross_gate") c.cross_gate = gate_mode_from_string(value);
    else if (key == "cross_with_c") c.cross_with_c = parse_bool(value);
    else if (key == "cross_activation") c.cross_activation = activation_from_string(value);
    else if (key == "cross_bias") c.cross_bias = parse_bool(value);
    else if (key == "cross_residual") c.cross_residual = parse_bool(value);
    else if (key == "deep_sizes") c.deep_sizes = parse_size_list(value);
    else if (key == "deep_activation") c.deep_activation = activation_from_string(value);
    else if (key == "head_bias") c.head_bias = parse_bool(value);
    else if (key == "embed_dim") c.embed_dim = parse_u64(value);
    else if (key == "learning_rate") c.learning_rate = parse_double(value);
    else if (key == "batch_size") c.batch_size = parse_u64(value);
    else if (key == "train_steps") c.train_steps = parse_u64(value);
    else if (key == "clip_norm") c.clip_norm = parse_double(value);
    else if (key == "ema_decay") c.ema_decay = parse_double(value);
    else if (key == "l2_lambda") c.l2_lambda = parse_double(value);
    else if (key == "eval_every") c.eval_every = parse_u64(value);
    else if (key == "checkpoint") c.checkpoint = value;
    else if (key == "feature_blocks") c.feature_blocks = value;
    else if (key == "rank_tolerance") c.rank_tolerance = parse_double(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) apply_config_line(c, line);
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config file " + path);
    std::stringstream buffer;
    buffer << is.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "experiment = " << to_string(c.experiment) << '\n';
    os << "out_dir = " << c.out_dir << '\n';
    os << "seed = " << c.seed << '\n';
    os << "repeats = " << c.repeats << '\n';
    os << "dataset = " << c.dataset << '\n';
    os << "data_seed = " << c.data_seed << '\n';
    os << "train_samples = " << c.train_samples << '\n';
    os << "test_samples = " << c.test_samples << '\n';
    os << "split_fraction = " << double_string(c.split_fraction) << '\n';
    os << "csv_path = " << c.csv_path << '\n';
    os << "task = " << to_string(c.task) << '\n';
    os << "structure = " << to_string(c.structure) << '\n';
    os << "cross_kind = " << to_string(c.cross_kind) << '\n';
    os << "cross_layers = " << c.cross_layers << '\n';
    os << "cross_rank = " << c.cross_rank << '\n';
    os << "cross_experts = " << c.cross_experts << '\n';
    os << "cross_gate = " << to_string(c.cross_gate) << '\n';
    os << "cross_with_c = " << (c.cross_with_c ? "true" : "false") << '\n';
    os << "cross_activation = " << to_string(c.cross_activation) << '\n';
    os << "cross_bias = " << (c.cross_bias ? "true" : "false") << '\n';
    os << "cross_residual = " << (c.cross_residual ? "true" : "false") << '\n';
    os << "deep_sizes = " << size_list_string(c.deep_sizes) << '\n';
    os << "deep_activation = " << to_string(c.deep_activation) << '\n';
    os << "head_bias = " << (c.head_bias ? "true" : "false") << '\n';
    os << "embed_dim = " << c.embed_dim << '\n';
    os << "learning_rate = " << double_string(c.learning_rate) << '\n';
    os << "batch_size = " << c.batch_size << '\n';
    os << "train_steps = " << c.train_steps << '\n';
    os << "clip_norm = " << double_string(c.clip_norm) << '\n';
    os << "ema_decay = " << double_string(c.ema_decay) << '\n';
    os << "l2_lambda = " << double_string(c.l2_lambda) << '\n';
    os << "eval_every = " << c.eval_every << '\n';
    os << "checkpoint = " << c.checkpoint << '\n';
    os << "feature_blocks = " << c.feature_blocks << '\n';
    os << "rank_tolerance = " << double_string(c.rank_tolerance) << '\n';
    for (const auto& col : c.schema.columns)
        os << "column." << col.name << " = " << column_value_string(col) << '\n';
    return os.str();
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> kSynthNames = {"f1", "f2", "f3", "homogeneous3", "homogeneous4",
                                                         "combined"};
    if (repeats < 1) throw std::invalid_argument("config: repeats must be >= 1");
    switch (experiment) {
        case ExperimentKind::synth_fit:
            if (std::find(kSynthNames.begin(), kSynthNames.end(), dataset) == kSynthNames.end())
                throw std::invalid_argument("config: unknown synthetic dataset '" + dataset + "'");
            if (task != Task::regression_mse)
                throw std::invalid_argument("config: synth-fit targets are regression");
            break;
        case ExperimentKind::train:
            if (dataset != "csv") throw std::invalid_argument("config: train expects dataset = csv");
            if (csv_path.empty()) throw std::invalid_argument("config: train needs csv_path");
            schema.validate();
            if (!(split_fraction > 0.0 && split_fraction < 1.0))
                throw std::invalid_argument("config: split_fraction must be in (0, 1)");
            break;
        case ExperimentKind::analyze:
            if (checkpoint.empty()) throw std::invalid_argument("config: analyze needs a checkpoint path");
            if (!(rank_tolerance > 0.0 && rank_tolerance < 1.0))
                throw std::invalid_argument("config: rank_tolerance must be in (0, 1)");
            break;
        case ExperimentKind::gradcheck:
        case ExperimentKind::oracle: break;
    }
    if (experiment == ExperimentKind::synth_fit || experiment == ExperimentKind::train) {
        train_config(seed);  // validates the optimizer fields
        ModelSpec probe;     // validates the architecture fields on a stand-in dimension
        probe.structure = structure;
        probe.task = task;
        probe.input_dim = 4;
        probe.cross_layers = cross_layer_specs();
        probe.deep_sizes = deep_sizes;
        probe.deep_activation = deep_activation;
        probe.head_bias = head_bias;
        probe.validate();
    }
}

TrainConfig ExperimentConfig::train_config(std::uint64_t run_seed) const {
    TrainConfig tc;
    tc.learning_rate = learning_rate;
    tc.batch_size = batch_size;
    tc.steps = train_steps;
    tc.clip_norm = clip_norm;
    tc.ema_decay = ema_decay;
    tc.lambda = l2_lambda;
    tc.seed = run_seed;
    tc.eval_every = eval_every;
    tc.validate();
    return tc;
}

std::vector<CrossLayerSpec> ExperimentConfig::cross_layer_specs() const {
    std::vector<CrossLayerSpec> specs;
    for (std::size_t i = 0; i < cross_layers; ++i) {
        CrossLayerSpec cl;
        cl.kind = cross_kind;
        cl.rank = cross_rank;
        cl.experts = cross_experts;
        cl.gate = cross_gate;
        cl.with_c = cross_with_c;
        cl.expert_activation = cross_activation;
        cl.use_bias = cross_bias;
        cl.use_residual = cross_residual;
        specs.push_back(cl);
    }
    return specs;
}

}  // namespace crossnet
