#include "crossnet/tabular.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossnet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_dense(const ColumnSpec& spec, const std::string& cell, std::size_t row) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != cell.size())
        throw std::runtime_error("row " + std::to_string(row) + ": column " + spec.name +
                                 ": unparseable dense value '" + cell + "'");
    if (spec.log_transform) {
        const double shifted = v + spec.log_shift;
        if (shifted <= 0.0)
            throw std::runtime_error("row " + std::to_string(row) + ": column " + spec.name +
                                     ": log transform domain error for value " + cell);
        v = std::log(shifted);
    }
    return v;
}

std::uint32_t lookup_token(const ColumnSpec& spec, Vocab& vocab, const std::string& token, bool fit,
                           std::size_t row) {
    auto it = vocab.index.find(token);
    if (it != vocab.index.end()) return it->second;
    if (fit) {
        const std::uint32_t next = static_cast<std::uint32_t>(vocab.tokens.size()) + (vocab.open ? 1u : 0u);
        if (spec.declared_vocab > 0 && next >= spec.declared_vocab)
            throw std::runtime_error("row " + std::to_string(row) + ": column " + spec.name +
                                     ": vocab overflow past declared size " +
                                     std::to_string(spec.declared_vocab));
        vocab.tokens.push_back(token);
        vocab.index.emplace(token, next);
        return next;
    }
    if (vocab.open) return 0;  // reserved out-of-vocab slot
    throw std::runtime_error("row " + std::to_string(row) + ": column " + spec.name +
                             ": out-of-vocab token '" + token + "'");
}

}  // namespace

TabularData load_tabular_csv(const std::string& path, const TabularSchema& schema, Task task,
                             const std::vector<Vocab>* fitted) {
    schema.validate();
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read csv file " + path);

    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(path + ": empty file, header required");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);

    // Map each schema column to its position in the file.
    std::vector<std::pair<const ColumnSpec*, std::size_t>> bound;
    for (const auto& spec : schema.columns) {
        std::size_t pos = header.size();
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == spec.name) pos = i;
        if (pos == header.size())
            throw std::runtime_error(path + ": missing column '" + spec.name + "' in header");
        bound.emplace_back(&spec, pos);
    }

    TabularData out;
    out.task = task;
    const bool fit = fitted == nullptr;
    std::size_t vocab_i = 0;
    for (const auto& [spec, pos] : bound) {
        (void)pos;
        if (spec->kind == ColumnKind::categorical || spec->kind == ColumnKind::multivalent) {
            out.categorical_names.push_back(spec->name);
            if (fit) {
                Vocab v;
                v.column = spec->name;
                v.open = spec->open_vocab;
                out.vocabs.push_back(std::move(v));
            } else {
                if (vocab_i >= fitted->size())
                    throw std::runtime_error("load_tabular_csv: fitted vocab count mismatch");
                out.vocabs.push_back((*fitted)[vocab_i++]);
            }
        } else if (spec->kind == ColumnKind::dense) {
            out.dense_names.push_back(spec->name);
        }
    }

    std::size_t row = 1;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(header.size()));
        SparseExample ex;
        double label = 0.0;
        std::size_t vi = 0;
        for (const auto& [spec, pos] : bound) {
            const std::string& cell = cells[pos];
            switch (spec->kind) {
                case ColumnKind::categorical: {
                    if (cell.empty())
                        throw std::runtime_error("row " + std::to_string(row) + ": column " + spec->name +
                                                 ": empty categorical cell");
                    ex.indices.push_back({lookup_token(*spec, out.vocabs[vi], cell, fit, row)});
                    ++vi;
                    break;
                }
                case ColumnKind::multivalent: {
                    std::vector<std::uint32_t> ids;
                    std::stringstream ss(cell);
                    std::string token;
                    while (std::getline(ss, token, '|'))
                        if (!token.empty()) ids.push_back(lookup_token(*spec, out.vocabs[vi], token, fit, row));
                    if (ids.empty())
                        throw std::runtime_error("row " + std::to_string(row) + ": column " + spec->name +
                                                 ": empty multivalent cell");
                    ex.indices.push_back(std::move(ids));
                    ++vi;
                    break;
                }
                case ColumnKind::dense: ex.dense.push_back(parse_dense(*spec, cell, row)); break;
                case ColumnKind::label: {
                    label = parse_dense(*spec, cell, row);
                    if (task == Task::binary_logloss && label != 0.0 && label != 1.0)
                        throw std::runtime_error("row " + std::to_string(row) + ": label " + cell +
                                                 " outside binary task range");
                    break;
                }
            }
        }
        out.dataset.examples.push_back(std::move(ex));
        out.dataset.labels.push_back(label);
        ++row;
    }
    if (out.dataset.labels.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

std::size_t embed_size_rule(std::size_t vocab_size) {
    if (vocab_size < 1) throw std::invalid_argument("embed_size_rule: vocab_size must be >= 1");
    const double e = 6.0 * std::pow(static_cast<double>(vocab_size), 0.25);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(e)));
}

}  // namespace crossnet
