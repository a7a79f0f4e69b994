#include "crossnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crossnet/svd.hpp"

namespace crossnet {

SpectrumReport spectrum(const Matrix& w) {
    SpectrumReport report;
    Vector sigma = singular_values(w);
    report.sigma1 = sigma.front();
    if (report.sigma1 == 0.0) {
        report.degenerate = true;
        report.normalized.assign(sigma.size(), 0.0);
        return report;
    }
    report.normalized.resize(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) report.normalized[i] = sigma[i] / report.sigma1;
    return report;
}

std::size_t numerical_rank(const SpectrumReport& report, double tolerance) {
    if (report.normalized.empty()) throw std::invalid_argument("numerical_rank: empty spectrum");
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw std::invalid_argument("numerical_rank: tolerance must be in (0, 1)");
    if (report.degenerate) return 0;
    std::size_t count = 0;
    for (const double s : report.normalized)
        if (s >= tolerance) ++count;
    return count;
}

BlockNormMap block_norms(const Matrix& w, const FeaturePartition& partition,
                         std::vector<std::string> feature_names) {
    if (partition.total_dim() != w.rows() || w.rows() != w.cols())
        throw std::invalid_argument("block_norms: partition does not tile a square matrix of size " +
                                    shape_str(w));
    const std::size_t k = partition.feature_count();
    if (feature_names.empty()) {
        feature_names.reserve(k);
        for (std::size_t i = 0; i < k; ++i) feature_names.push_back("f" + std::to_string(i));
    }
    if (feature_names.size() != k)
        throw std::invalid_argument("block_norms: need one name per feature block");

    BlockNormMap map;
    map.feature_names = std::move(feature_names);
    map.norms = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t ro = partition.offset(i), co = partition.offset(j);
            double acc = 0.0;
            for (std::size_t r = 0; r < partition.sizes[i]; ++r)
                for (std::size_t c = 0; c < partition.sizes[j]; ++c) {
                    const double v = w(ro + r, co + c);
                    acc += v * v;
                }
            map.norms(i, j) = std::sqrt(acc);
        }
    }
    return map;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(17);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return is;
}

}  // namespace

void write_spectrum_csv(const SpectrumReport& report, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "index,sigma_normalized\n";
    for (std::size_t i = 0; i < report.normalized.size(); ++i) os << i << ',' << report.normalized[i] << '\n';
}

void write_block_norm_csv(const BlockNormMap& map, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "feature_i,feature_j,frobenius_norm\n";
    for (std::size_t i = 0; i < map.norms.rows(); ++i)
        for (std::size_t j = 0; j < map.norms.cols(); ++j)
            os << map.feature_names[i] << ',' << map.feature_names[j] << ',' << map.norms(i, j) << '\n';
}

SpectrumReport read_spectrum_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    if (!std::getline(is, line) || line != "index,sigma_normalized")
        throw std::runtime_error(path + ": bad spectrum header");
    SpectrumReport report;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(path + ": bad spectrum row");
        report.normalized.push_back(std::stod(line.substr(comma + 1)));
    }
    // The CSV stores normalized values only; the raw sigma1 is not recoverable.
    if (!report.normalized.empty()) report.degenerate = report.normalized.front() == 0.0;
    return report;
}

BlockNormMap read_block_norm_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    if (!std::getline(is, line) || line != "feature_i,feature_j,frobenius_norm")
        throw std::runtime_error(path + ": bad block-norm header");
    std::vector<std::string> names;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string fi, fj, val;
        if (!std::getline(ss, fi, ',') || !std::getline(ss, fj, ',') || !std::getline(ss, val))
            throw std::runtime_error(path + ": bad block-norm row");
        if (names.empty() || fi != names.back())
            if (std::find(names.begin(), names.end(), fi) == names.end()) names.push_back(fi);
        values.push_back(std::stod(val));
    }
    const std::size_t k = names.size();
    if (values.size() != k * k) throw std::runtime_error(path + ": block-norm grid is not k x k");
    BlockNormMap map;
    map.feature_names = std::move(names);
    map.norms = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) map.norms(i, j) = values[i * k + j];
    return map;
}

}  // namespace crossnet
