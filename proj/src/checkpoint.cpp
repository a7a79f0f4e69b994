#include "crossnet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crossnet/config.hpp"

namespace crossnet {

namespace {

constexpr char kMagic[8] = {'C', 'N', 'E', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
    const std::uint32_t len = read_u32(is);
    std::string s(len, '\0');
    if (!is.read(s.data(), len)) throw std::runtime_error("checkpoint: truncated string");
    return s;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::string serialize_model_spec(const ModelSpec& spec) {
    std::ostringstream os;
    os << "structure = " << to_string(spec.structure) << '\n';
    os << "task = " << to_string(spec.task) << '\n';
    os << "input_dim = " << spec.input_dim << '\n';
    os << "deep_activation = " << to_string(spec.deep_activation) << '\n';
    os << "head_bias = " << (spec.head_bias ? "true" : "false") << '\n';
    os << "deep_sizes =";
    for (const auto s : spec.deep_sizes) os << ' ' << s;
    os << '\n';
    for (const auto& cl : spec.cross_layers) {
        os << "cross = " << to_string(cl.kind) << " rank " << cl.rank << " experts " << cl.experts << " gate "
           << to_string(cl.gate) << " with_c " << (cl.with_c ? 1 : 0) << " activation "
           << to_string(cl.expert_activation) << " bias " << (cl.use_bias ? 1 : 0) << " residual "
           << (cl.use_residual ? 1 : 0) << '\n';
    }
    if (spec.has_embedding) {
        os << "dense_features = " << spec.dense_features << '\n';
        for (const auto& f : spec.embed_features)
            os << "embed = " << f.name << ' ' << f.vocab << ' ' << f.embed_dim << '\n';
    }
    return os.str();
}

ModelSpec parse_model_spec(const std::string& text) {
    ModelSpec spec;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("model spec: bad line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "structure") spec.structure = structure_from_string(value);
        else if (key == "task") spec.task = task_from_string(value);
        else if (key == "input_dim") spec.input_dim = std::stoull(value);
        else if (key == "deep_activation") spec.deep_activation = activation_from_string(value);
        else if (key == "head_bias") spec.head_bias = value == "true";
        else if (key == "deep_sizes") {
            std::stringstream vs(value);
            std::size_t s = 0;
            while (vs >> s) spec.deep_sizes.push_back(s);
        } else if (key == "cross") {
            std::stringstream vs(value);
            CrossLayerSpec cl;
            std::string kind, word;
            vs >> kind;
            cl.kind = cross_kind_from_string(kind);
            while (vs >> word) {
                std::string v;
                if (!(vs >> v)) throw std::runtime_error("model spec: dangling token '" + word + "'");
                if (word == "rank") cl.rank = std::stoull(v);
                else if (word == "experts") cl.experts = std::stoull(v);
                else if (word == "gate") cl.gate = gate_mode_from_string(v);
                else if (word == "with_c") cl.with_c = v == "1";
                else if (word == "activation") cl.expert_activation = activation_from_string(v);
                else if (word == "bias") cl.use_bias = v == "1";
                else if (word == "residual") cl.use_residual = v == "1";
                else throw std::runtime_error("model spec: unknown cross field '" + word + "'");
            }
            spec.cross_layers.push_back(cl);
        } else if (key == "dense_features") {
            spec.dense_features = std::stoull(value);
        } else if (key == "embed") {
            std::stringstream vs(value);
            EmbeddingFeatureSpec f;
            if (!(vs >> f.name >> f.vocab >> f.embed_dim))
                throw std::runtime_error("model spec: bad embed line '" + value + "'");
            spec.has_embedding = true;
            spec.embed_features.push_back(std::move(f));
        } else {
            throw std::runtime_error("model spec: unknown key '" + key + "'");
        }
    }
    return spec;
}

void save_checkpoint(const Model& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint " + path);
    os.write(kMagic, sizeof kMagic);
    write_u32(os, kVersion);
    write_string(os, serialize_model_spec(model.spec()));
    const auto params = model.params();
    write_u64(os, params.size());
    for (const Param* p : params) {
        write_string(os, p->name);
        write_u64(os, p->value.rows());
        write_u64(os, p->value.cols());
        os.write(reinterpret_cast<const char*>(p->value.data()),
                 static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("write failure on checkpoint " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read checkpoint " + path);
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error(path + ": not a checkpoint file");
    const std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));

    Model model(parse_model_spec(read_string(is)));
    auto params = model.params();
    const std::uint64_t count = read_u64(is);
    if (count != params.size())
        throw std::runtime_error(path + ": checkpoint holds " + std::to_string(count) + " arrays, model needs " +
                                 std::to_string(params.size()));
    for (Param* p : params) {
        const std::string name = read_string(is);
        const std::uint64_t rows = read_u64(is), cols = read_u64(is);
        if (name != p->name)
            throw std::runtime_error(path + ": expected array '" + p->name + "', found '" + name + "'");
        if (rows != p->value.rows() || cols != p->value.cols())
            throw std::runtime_error(path + ": array " + name + " has shape " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + ", model needs " + shape_str(p->value));
        if (!is.read(reinterpret_cast<char*>(p->value.data()),
                     static_cast<std::streamsize>(p->value.size() * sizeof(double))))
            throw std::runtime_error(path + ": truncated array " + name);
    }
    return model;
}

}  // namespace crossnet
