#pragma once

#include <map>
#include <ostream>
#include <vector>

#include "crossnet/linalg.hpp"
#include "crossnet/partition.hpp"

namespace crossnet {

/// Graded lexicographic order on exponent multi-indices: lower total degree
/// first, ties broken lexicographically. Gives polynomial dumps and
/// iteration a canonical order.
struct GradedLexLess {
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const;
};

/// Multivariate polynomial as a multi-index -> coefficient map. Zero
/// coefficients are never stored; arithmetic prunes cancellation residue
/// below 1e-14 in absolute value.
class SparsePolynomial {
public:
    using TermMap = std::map<std::vector<int>, double, GradedLexLess>;

    explicit SparsePolynomial(std::size_t dim) : dim_(dim) {}
    static SparsePolynomial variable(std::size_t dim, std::size_t index);
    static SparsePolynomial constant(std::size_t dim, double value);

    std::size_t dim() const { return dim_; }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    void add_term(const std::vector<int>& alpha, double coeff);
    double coefficient(const std::vector<int>& alpha) const;

    SparsePolynomial& operator+=(const SparsePolynomial& other);
    SparsePolynomial& scale(double factor);
    SparsePolynomial operator*(const SparsePolynomial& other) const;

    double evaluate(const Vector& x) const;
    /// Max |alpha| over stored terms; 0 for the zero polynomial.
    int max_degree() const;

private:
    static constexpr double kCancelTol = 1e-14;
    std::size_t dim_;
    TermMap terms_;
};

int max_degree(const SparsePolynomial& poly);

/// Cross network variant for symbolic analysis: x^{i} =
/// x (.) (W^{(i-1)} x^{i-1} [+ b^{(i-1)}]) [+ x^{i-1}], with the bias and
/// residual terms toggled independently.
struct CrossNetVariant {
    bool use_bias = false;
    bool use_residual = true;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;  // may be empty when use_bias is false

    std::size_t dim() const { return weights.empty() ? 0 : weights.front().rows(); }
    std::size_t depth() const { return weights.size(); }
    void validate() const;

    /// Numeric forward pass (per-coordinate reference for the expansion).
    Vector forward(const Vector& x) const;
};

struct CrossNetExpansion {
    std::vector<SparsePolynomial> coords;  // polynomial for each coordinate of x^l
    SparsePolynomial sum;                  // 1^T x^l
};

/// Exact symbolic expansion; guarded to d <= 8, depth <= 4 to keep the term
/// maps in memory.
CrossNetExpansion expand_crossnet(const CrossNetVariant& variant);

/// Closed-form coefficient of the monomial x^alpha in 1^T x^l for the
/// no-bias (with-residual) variant: a sum over strictly decreasing layer
/// tuples and multiset permutations of products of weight entries.
/// Requires 2 <= |alpha| <= l+1.
double theorem1_coefficient(const std::vector<int>& alpha, const std::vector<Matrix>& weights);

/// Numeric feature-wise interaction g(I, J; x, W): I is an ordered list of
/// (repeatable) feature indices, J a strictly decreasing list of layer
/// indices with |I| == |J|+1. Indices are 0-based.
Vector featurewise_interaction(const std::vector<std::size_t>& feature_ids,
                               const std::vector<std::size_t>& layer_ids, const Vector& x,
                               const std::vector<Matrix>& weights, const FeaturePartition& partition);

/// All (I, J) pairs contributing to coordinate block `feature` of x^l for a
/// k-feature input, orders p = 2..l+1. Guarded to k, l <= 4.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> enumerate_interactions(
    std::size_t k, std::size_t l, std::size_t feature);

/// One term per line: "a1 a2 ... ad coefficient", graded-lex order.
void dump_polynomial(const SparsePolynomial& poly, std::ostream& os);

}  // namespace crossnet
