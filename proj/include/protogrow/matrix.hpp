#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace protogrow::la {

/// Dense row-major matrix of doubles. The only container every other
/// component builds on; kept deliberately small.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("Matrix: dimensions must be >= 1");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using Vector = std::vector<double>;

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm(const Matrix& a);
double frobenius_norm_sq(const Matrix& a);
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);

/// y = A x
Vector matvec(const Matrix& a, const Vector& x);
/// y = A^T x
Vector matvec_t(const Matrix& a, const Vector& x);

/// Columns [c0, c0+n) as a rows x n matrix.
Matrix columns(const Matrix& a, std::size_t c0, std::size_t n);

/// Neumaier compensated sum; used where cancellation matters.
double compensated_sum(const std::vector<double>& xs);

}  // namespace protogrow::la
