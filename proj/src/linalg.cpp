#include "crossnet/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace crossnet {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols())
            throw std::invalid_argument("from_rows: ragged rows");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Vector Matrix::row_copy(std::size_t r) const {
    return Vector(row(r), row(r) + cols_);
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

void Matrix::fill(double v) {
    for (auto& x : data_) x = v;
}

std::string shape_str(const Matrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size())
        throw std::invalid_argument("matvec: shape mismatch " + shape_str(a) + " vs vector of length " +
                                    std::to_string(x.size()));
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* r = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
    if (a.rows() != x.size())
        throw std::invalid_argument("matvec_t: shape mismatch " + shape_str(a) + "^T vs vector of length " +
                                    std::to_string(x.size()));
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* r = a.row(i);
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * r[j];
    }
    return y;
}

void matmul_into(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: shape mismatch " + shape_str(a) + " * " + shape_str(b));
    if (c.rows() != a.rows() || c.cols() != b.cols()) c = Matrix(a.rows(), b.cols());
    else if (!accumulate) c.fill(0.0);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    for (std::size_t i = 0; i < m; ++i) {
        const double* ar = a.row(i);
        double* cr = c.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double ap = ar[p];
            const double* br = b.row(p);
            for (std::size_t j = 0; j < n; ++j) cr[j] += ap * br[j];
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c;
    matmul_into(a, b, c);
    return c;
}

void matmul_at_b_into(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_at_b: shape mismatch " + shape_str(a) + "^T * " + shape_str(b));
    if (c.rows() != a.cols() || c.cols() != b.cols()) c = Matrix(a.cols(), b.cols());
    else if (!accumulate) c.fill(0.0);
    // C[i,j] += sum_p A[p,i] B[p,j]; the p-outer order keeps both reads streaming.
    const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
    for (std::size_t p = 0; p < k; ++p) {
        const double* ar = a.row(p);
        const double* br = b.row(p);
        for (std::size_t i = 0; i < m; ++i) {
            const double ap = ar[i];
            double* cr = c.row(i);
            for (std::size_t j = 0; j < n; ++j) cr[j] += ap * br[j];
        }
    }
}

void matmul_a_bt_into(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_a_bt: shape mismatch " + shape_str(a) + " * " + shape_str(b) + "^T");
    Matrix bt = b.transposed();
    matmul_into(a, bt, c, accumulate);
}

void add_into(const Matrix& a, Matrix& acc) {
    if (a.rows() != acc.rows() || a.cols() != acc.cols())
        throw std::invalid_argument("add_into: shape mismatch " + shape_str(a) + " vs " + shape_str(acc));
    for (std::size_t i = 0; i < a.size(); ++i) acc.data()[i] += a.data()[i];
}

Vector hadamard(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hadamard: length mismatch " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
    return c;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * a.data()[i];
    return std::sqrt(acc);
}

bool all_finite(const Vector& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const Matrix& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a.data()[i])) return false;
    return true;
}

}  // namespace crossnet
