#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace crossnet {

using Vector = std::vector<double>;

/// Dense row-major matrix of 64-bit floats. All layer math in this library
/// runs in double precision so that finite-difference gradient checks hold
/// at 1e-5 relative tolerance.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    Vector row_copy(std::size_t r) const;
    Matrix transposed() const;
    void fill(double v);

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

std::string shape_str(const Matrix& a);

// y = A x
Vector matvec(const Matrix& a, const Vector& x);
// y = A^T x
Vector matvec_t(const Matrix& a, const Vector& x);

// C = A B (or C += A B with accumulate). The kernel is an ikj loop; operands
// needing transposition are materialized first, which is cheap next to the
// product itself at the sizes used here.
void matmul_into(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
Matrix matmul(const Matrix& a, const Matrix& b);
void matmul_at_b_into(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void matmul_a_bt_into(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);

// acc += a, elementwise
void add_into(const Matrix& a, Matrix& acc);

Vector hadamard(const Vector& a, const Vector& b);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double frobenius_norm(const Matrix& a);

bool all_finite(const Vector& a);
bool all_finite(const Matrix& a);

}  // namespace crossnet
