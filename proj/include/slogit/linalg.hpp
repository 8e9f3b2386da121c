#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slogit {

using Vector = std::vector<double>;

// Dense column-major matrix. Column-major because every hot loop in the
// library walks columns (per-coordinate gradients, column sums of squares).
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double* col(std::size_t j) noexcept { return data_.data() + j * rows_; }
    const double* col(std::size_t j) const noexcept { return data_.data() + j * rows_; }
    std::span<const double> col_span(std::size_t j) const noexcept {
        return {col(j), rows_};
    }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
    const double& operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[j * rows_ + i];
    }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    Vector data_;
};

// y = X * beta; skips zero coefficients (betas along a lasso path are sparse).
Vector matvec(const Matrix& X, std::span<const double> beta);
// X^T * v
Vector matvec_transpose(const Matrix& X, std::span<const double> v);

double norm2(std::span<const double> v);
double norm2_sq(std::span<const double> v);
double norm1(std::span<const double> v);
double norm_inf(std::span<const double> v);
double max_abs_entry(const Matrix& X);

// Largest eigenvalue of a small symmetric k x k matrix (row-major),
// by power iteration. Used for per-block curvature bounds.
double sym_max_eigenvalue(std::span<const double> A, std::size_t k, int iters = 200);

// Solves A x = b for symmetric positive definite A (k x k row-major).
// A and b are overwritten; returns false if a pivot collapses.
bool cholesky_solve(std::vector<double>& A, std::vector<double>& b, std::size_t k);

} // namespace slogit
