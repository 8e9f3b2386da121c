#include "slogit/linalg.hpp"

#include "slogit/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace slogit {

Vector matvec(const Matrix& X, std::span<const double> beta) {
    if (beta.size() != X.cols()) throw std::invalid_argument("matvec: dimension mismatch");
    Vector y(X.rows(), 0.0);
    for (std::size_t j = 0; j < X.cols(); ++j) {
        if (beta[j] != 0.0) kernels::axpy(beta[j], X.col(j), y.data(), X.rows());
    }
    return y;
}

Vector matvec_transpose(const Matrix& X, std::span<const double> v) {
    if (v.size() != X.rows()) throw std::invalid_argument("matvec_transpose: dimension mismatch");
    Vector out(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j)
        out[j] = kernels::dot(X.col(j), v.data(), X.rows());
    return out;
}

double norm2_sq(std::span<const double> v) { return kernels::sum_sq(v.data(), v.size()); }

double norm2(std::span<const double> v) { return std::sqrt(norm2_sq(v)); }

double norm1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

double norm_inf(std::span<const double> v) { return kernels::max_abs(v.data(), v.size()); }

double max_abs_entry(const Matrix& X) {
    return kernels::max_abs(X.data(), X.rows() * X.cols());
}

double sym_max_eigenvalue(std::span<const double> A, std::size_t k, int iters) {
    if (k == 0) return 0.0;
    if (k == 1) return std::fabs(A[0]);
    Vector v(k, 1.0 / std::sqrt(static_cast<double>(k)));
    Vector w(k);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < k; ++i)
            w[i] = kernels::dot(A.data() + i * k, v.data(), k);
        double nw = norm2(w);
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / nw;
        double next = nw;
        if (it > 4 && std::fabs(next - lambda) <= 1e-13 * std::max(1.0, next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

bool cholesky_solve(std::vector<double>& A, std::vector<double>& b, std::size_t k) {
    // In-place Cholesky factorization, then two triangular solves.
    for (std::size_t j = 0; j < k; ++j) {
        double d = A[j * k + j];
        for (std::size_t t = 0; t < j; ++t) d -= A[j * k + t] * A[j * k + t];
        if (d <= 0.0 || !std::isfinite(d)) return false;
        d = std::sqrt(d);
        A[j * k + j] = d;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = A[i * k + j];
            for (std::size_t t = 0; t < j; ++t) s -= A[i * k + t] * A[j * k + t];
            A[i * k + j] = s / d;
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        double s = b[i];
        for (std::size_t t = 0; t < i; ++t) s -= A[i * k + t] * b[t];
        b[i] = s / A[i * k + i];
    }
    for (std::size_t ii = k; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t t = ii + 1; t < k; ++t) s -= A[t * k + ii] * b[t];
        b[ii] = s / A[ii * k + ii];
    }
    return true;
}

} // namespace slogit
