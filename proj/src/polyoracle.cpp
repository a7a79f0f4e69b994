#include "crossnet/polyoracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crossnet {

bool GradedLexLess::operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    const int da = std::accumulate(a.begin(), a.end(), 0);
    const int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a < b;
}

SparsePolynomial SparsePolynomial::variable(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::out_of_range("SparsePolynomial::variable: index out of range");
    SparsePolynomial p(dim);
    std::vector<int> alpha(dim, 0);
    alpha[index] = 1;
    p.terms_.emplace(std::move(alpha), 1.0);
    return p;
}

SparsePolynomial SparsePolynomial::constant(std::size_t dim, double value) {
    SparsePolynomial p(dim);
    if (value != 0.0) p.terms_.emplace(std::vector<int>(dim, 0), value);
    return p;
}

void SparsePolynomial::add_term(const std::vector<int>& alpha, double coeff) {
    if (alpha.size() != dim_) throw std::invalid_argument("add_term: multi-index length mismatch");
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
        if (coeff != 0.0) terms_.emplace(alpha, coeff);
        return;
    }
    it->second += coeff;
    if (std::abs(it->second) <= kCancelTol) terms_.erase(it);
}

double SparsePolynomial::coefficient(const std::vector<int>& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
}

SparsePolynomial& SparsePolynomial::operator+=(const SparsePolynomial& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("polynomial +=: dimension mismatch");
    for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
    return *this;
}

SparsePolynomial& SparsePolynomial::scale(double factor) {
    if (factor == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [alpha, c] : terms_) c *= factor;
    return *this;
}

SparsePolynomial SparsePolynomial::operator*(const SparsePolynomial& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("polynomial *: dimension mismatch");
    SparsePolynomial out(dim_);
    std::vector<int> alpha(dim_);
    for (const auto& [a1, c1] : terms_) {
        for (const auto& [a2, c2] : other.terms_) {
            for (std::size_t i = 0; i < dim_; ++i) alpha[i] = a1[i] + a2[i];
            out.add_term(alpha, c1 * c2);
        }
    }
    return out;
}

double SparsePolynomial::evaluate(const Vector& x) const {
    if (x.size() != dim_) throw std::invalid_argument("polynomial evaluate: input length mismatch");
    double acc = 0.0;
    for (const auto& [alpha, c] : terms_) {
        double prod = c;
        for (std::size_t i = 0; i < dim_; ++i)
            for (int k = 0; k < alpha[i]; ++k) prod *= x[i];
        acc += prod;
    }
    return acc;
}

int SparsePolynomial::max_degree() const {
    if (terms_.empty()) return 0;
    // Graded-lex keeps the highest total degree last.
    const auto& alpha = terms_.rbegin()->first;
    return std::accumulate(alpha.begin(), alpha.end(), 0);
}

int max_degree(const SparsePolynomial& poly) { return poly.max_degree(); }

void CrossNetVariant::validate() const {
    if (weights.empty()) throw std::invalid_argument("cross net variant: no layers");
    const std::size_t d = weights.front().rows();
    for (const auto& w : weights)
        if (w.rows() != d || w.cols() != d)
            throw std::invalid_argument("cross net variant: weights must all be d x d");
    if (use_bias) {
        if (biases.size() != weights.size())
            throw std::invalid_argument("cross net variant: need one bias per layer");
        for (const auto& b : biases)
            if (b.size() != d) throw std::invalid_argument("cross net variant: bias length mismatch");
    }
}

Vector CrossNetVariant::forward(const Vector& x) const {
    validate();
    Vector cur = x;
    for (std::size_t layer = 0; layer < weights.size(); ++layer) {
        Vector pre = matvec(weights[layer], cur);
        if (use_bias)
            for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += biases[layer][i];
        Vector next = hadamard(x, pre);
        if (use_residual)
            for (std::size_t i = 0; i < next.size(); ++i) next[i] += cur[i];
        cur = std::move(next);
    }
    return cur;
}

CrossNetExpansion expand_crossnet(const CrossNetVariant& variant) {
    variant.validate();
    const std::size_t d = variant.dim();
    const std::size_t depth = variant.depth();
    if (d > 8 || depth > 4)
        throw std::invalid_argument("expand_crossnet: guarded to d <= 8 and depth <= 4");

    std::vector<SparsePolynomial> base;
    base.reserve(d);
    for (std::size_t i = 0; i < d; ++i) base.push_back(SparsePolynomial::variable(d, i));

    std::vector<SparsePolynomial> cur = base;
    for (std::size_t layer = 0; layer < depth; ++layer) {
        const Matrix& w = variant.weights[layer];
        std::vector<SparsePolynomial> next;
        next.reserve(d);
        for (std::size_t i = 0; i < d; ++i) {
            // pre_i = sum_j W[i,j] cur_j (+ b_i)
            SparsePolynomial pre(d);
            for (std::size_t j = 0; j < d; ++j) {
                if (w(i, j) == 0.0) continue;
                SparsePolynomial scaled = cur[j];
                scaled.scale(w(i, j));
                pre += scaled;
            }
            if (variant.use_bias) pre += SparsePolynomial::constant(d, variant.biases[layer][i]);
            SparsePolynomial out = base[i] * pre;
            if (variant.use_residual) out += cur[i];
            next.push_back(std::move(out));
        }
        cur = std::move(next);
    }

    CrossNetExpansion expansion{std::move(cur), SparsePolynomial(d)};
    for (const auto& p : expansion.coords) expansion.sum += p;
    return expansion;
}

double theorem1_coefficient(const std::vector<int>& alpha, const std::vector<Matrix>& weights) {
    if (weights.empty()) throw std::invalid_argument("theorem1_coefficient: no layers");
    const std::size_t l = weights.size();
    const std::size_t d = weights.front().rows();
    if (alpha.size() != d) throw std::invalid_argument("theorem1_coefficient: multi-index length mismatch");
    const int order = std::accumulate(alpha.begin(), alpha.end(), 0);
    if (order < 2 || static_cast<std::size_t>(order) > l + 1)
        throw std::invalid_argument("theorem1_coefficient: need 2 <= |alpha| <= depth+1");

    // Multiset of variable indices: i repeated alpha_i times, ascending.
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < d; ++i)
        for (int k = 0; k < alpha[i]; ++k) indices.push_back(i);

    // Strictly decreasing (order-1)-tuples of layer indices from {0..l-1}:
    // combinations enumerated ascending, then reversed.
    const std::size_t p = static_cast<std::size_t>(order);
    std::vector<std::vector<std::size_t>> layer_tuples;
    std::vector<std::size_t> combo(p - 1);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    for (;;) {
        layer_tuples.emplace_back(combo.rbegin(), combo.rend());
        // next combination
        std::size_t k = p - 1;
        while (k > 0) {
            --k;
            if (combo[k] != k + l - (p - 1)) break;
        }
        if (combo[k] == k + l - (p - 1)) break;
        ++combo[k];
        for (std::size_t j = k + 1; j < p - 1; ++j) combo[j] = combo[j - 1] + 1;
    }

    double total = 0.0;
    std::vector<std::size_t> perm = indices;  // already sorted ascending
    do {
        for (const auto& layers : layer_tuples) {
            double prod = 1.0;
            for (std::size_t k = 0; k + 1 < p; ++k) prod *= weights[layers[k]](perm[k], perm[k + 1]);
            total += prod;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

Vector featurewise_interaction(const std::vector<std::size_t>& feature_ids,
                               const std::vector<std::size_t>& layer_ids, const Vector& x,
                               const std::vector<Matrix>& weights, const FeaturePartition& partition) {
    if (feature_ids.size() != layer_ids.size() + 1)
        throw std::invalid_argument("featurewise_interaction: need |I| == |J| + 1");
    for (std::size_t k = 0; k + 1 < layer_ids.size(); ++k)
        if (layer_ids[k] <= layer_ids[k + 1])
            throw std::invalid_argument("featurewise_interaction: layer indices must strictly decrease");
    for (const std::size_t f : feature_ids)
        if (f >= partition.feature_count())
            throw std::invalid_argument("featurewise_interaction: feature index out of range");
    for (const std::size_t j : layer_ids)
        if (j >= weights.size())
            throw std::invalid_argument("featurewise_interaction: layer index out of range");
    if (x.size() != partition.total_dim())
        throw std::invalid_argument("featurewise_interaction: input length mismatch");

    auto feature_slice = [&](std::size_t f) {
        const std::size_t off = partition.offset(f);
        return Vector(x.begin() + static_cast<std::ptrdiff_t>(off),
                      x.begin() + static_cast<std::ptrdiff_t>(off + partition.sizes[f]));
    };

    const std::size_t p = feature_ids.size();
    Vector v = feature_slice(feature_ids[p - 1]);
    for (std::size_t k = p - 1; k-- > 0;) {
        // v <- x_{i_k} (.) (W^{(j_k)}_{i_k, i_{k+1}} v)
        const Matrix& w = weights[layer_ids[k]];
        const std::size_t row_f = feature_ids[k], col_f = feature_ids[k + 1];
        const std::size_t ro = partition.offset(row_f), co = partition.offset(col_f);
        const std::size_t rn = partition.sizes[row_f], cn = partition.sizes[col_f];
        if (v.size() != cn) throw std::logic_error("featurewise_interaction: block width mismatch");
        Vector next(rn, 0.0);
        for (std::size_t r = 0; r < rn; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < cn; ++c) acc += w(ro + r, co + c) * v[c];
            next[r] = acc;
        }
        const Vector xs = feature_slice(row_f);
        for (std::size_t r = 0; r < rn; ++r) next[r] *= xs[r];
        v = std::move(next);
    }
    return v;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> enumerate_interactions(
    std::size_t k, std::size_t l, std::size_t feature) {
    if (k > 4 || l > 4) throw std::invalid_argument("enumerate_interactions: guarded to k, l <= 4");
    if (feature >= k) throw std::invalid_argument("enumerate_interactions: feature index out of range");

    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
    for (std::size_t p = 2; p <= l + 1; ++p) {
        // All I in [k]^p with I[0] == feature.
        std::vector<std::vector<std::size_t>> i_tuples;
        std::vector<std::size_t> tuple(p, 0);
        tuple[0] = feature;
        std::size_t count = 1;
        for (std::size_t i = 1; i < p; ++i) count *= k;
        for (std::size_t code = 0; code < count; ++code) {
            std::size_t rem = code;
            for (std::size_t i = 1; i < p; ++i) {
                tuple[i] = rem % k;
                rem /= k;
            }
            i_tuples.push_back(tuple);
        }
        // All strictly decreasing (p-1)-tuples from {0..l-1}.
        if (p - 1 > l) continue;
        std::vector<std::vector<std::size_t>> j_tuples;
        std::vector<std::size_t> combo(p - 1);
        std::iota(combo.begin(), combo.end(), std::size_t{0});
        for (;;) {
            j_tuples.emplace_back(combo.rbegin(), combo.rend());
            std::size_t idx = p - 1;
            while (idx > 0) {
                --idx;
                if (combo[idx] != idx + l - (p - 1)) break;
            }
            if (combo[idx] == idx + l - (p - 1)) break;
            ++combo[idx];
            for (std::size_t j = idx + 1; j < p - 1; ++j) combo[j] = combo[j - 1] + 1;
        }
        for (const auto& I : i_tuples)
            for (const auto& J : j_tuples) out.emplace_back(I, J);
    }
    return out;
}

void dump_polynomial(const SparsePolynomial& poly, std::ostream& os) {
    for (const auto& [alpha, c] : poly.terms()) {
        for (const int a : alpha) os << a << ' ';
        os.precision(17);
        os << c << '\n';
    }
}

}  // namespace crossnet
