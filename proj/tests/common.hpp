#pragma once

#include "slogit/dataset.hpp"
#include "slogit/model.hpp"
#include "slogit/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace testutil {

using slogit::Dataset;
using slogit::Matrix;
using slogit::Vector;

inline Dataset random_dataset(std::size_t n, std::size_t p, std::uint64_t seed,
                              const Vector* beta_truth = nullptr) {
    auto rng = slogit::make_rng(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Dataset d;
    d.X = Matrix(n, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) d.X(i, j) = normal(rng);
    Vector f0(n, 0.0);
    if (beta_truth != nullptr) f0 = slogit::matvec(d.X, *beta_truth);
    d.f0 = f0;
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        d.y[i] = unif(rng) < slogit::sigmoid(f0[i]) ? 1.0 : 0.0;
    return d;
}

inline Vector random_vector(std::size_t p, std::uint64_t seed, double scale = 1.0) {
    auto rng = slogit::make_rng(seed, 1);
    std::normal_distribution<double> normal(0.0, scale);
    Vector v(p);
    for (double& x : v) x = normal(rng);
    return v;
}

// Central finite differences of the empirical risk.
inline Vector fd_gradient(const Vector& beta, const Dataset& data, double h = 1e-6) {
    Vector g(beta.size());
    Vector b = beta;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        b[j] = beta[j] + h;
        const double up = slogit::empirical_risk(b, data);
        b[j] = beta[j] - h;
        const double dn = slogit::empirical_risk(b, data);
        b[j] = beta[j];
        g[j] = (up - dn) / (2.0 * h);
    }
    return g;
}

// Unpenalized logistic MLE by damped Newton with Gaussian elimination;
// independent of the library's solver and linear algebra paths.
inline Vector newton_mle(const Dataset& data, int max_iter = 200) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    Vector beta(p, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        Vector f(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) f[i] += data.X(i, j) * beta[j];
        Vector grad(p, 0.0);
        std::vector<double> hess(p * p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = slogit::sigmoid(f[i]);
            const double w = pi * (1.0 - pi);
            for (std::size_t a = 0; a < p; ++a) {
                grad[a] += data.X(i, a) * (pi - data.y[i]);
                for (std::size_t b = 0; b < p; ++b)
                    hess[a * p + b] += data.X(i, a) * w * data.X(i, b);
            }
        }
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::fabs(g) / static_cast<double>(n));
        if (gmax <= 1e-12) break;

        // Gaussian elimination with partial pivoting on [hess | grad].
        Vector step = grad;
        std::vector<double> A = hess;
        for (std::size_t c = 0; c < p; ++c) {
            std::size_t piv = c;
            for (std::size_t rr = c + 1; rr < p; ++rr)
                if (std::fabs(A[rr * p + c]) > std::fabs(A[piv * p + c])) piv = rr;
            if (std::fabs(A[piv * p + c]) < 1e-14)
                throw std::runtime_error("newton_mle: singular hessian");
            if (piv != c) {
                for (std::size_t cc = 0; cc < p; ++cc) std::swap(A[piv * p + cc], A[c * p + cc]);
                std::swap(step[piv], step[c]);
            }
            for (std::size_t rr = c + 1; rr < p; ++rr) {
                const double m = A[rr * p + c] / A[c * p + c];
                for (std::size_t cc = c; cc < p; ++cc) A[rr * p + cc] -= m * A[c * p + cc];
                step[rr] -= m * step[c];
            }
        }
        Vector dir(p);
        for (std::size_t c = p; c-- > 0;) {
            double s = step[c];
            for (std::size_t cc = c + 1; cc < p; ++cc) s -= A[c * p + cc] * dir[cc];
            dir[c] = s / A[c * p + c];
        }
        double t = 1.0;
        const double risk0 = slogit::empirical_risk(beta, data);
        for (int bt = 0; bt < 40; ++bt) {
            Vector trial = beta;
            for (std::size_t j = 0; j < p; ++j) trial[j] -= t * dir[j];
            if (slogit::empirical_risk(trial, data) <= risk0 + 1e-15) {
                beta = trial;
                break;
            }
            t *= 0.5;
        }
    }
    return beta;
}

} // namespace testutil
