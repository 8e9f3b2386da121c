#include "slogit/weights.hpp"

#include "slogit/kernels.hpp"
#include "slogit/model.hpp"
#include "slogit/simulation.hpp"
#include "slogit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slogit {

double PenaltyWeights::max() const {
    if (values.empty()) throw std::invalid_argument("weights: empty");
    return *std::max_element(values.begin(), values.end());
}

double PenaltyWeights::min() const {
    if (values.empty()) throw std::invalid_argument("weights: empty");
    return *std::min_element(values.begin(), values.end());
}

void PenaltyWeights::validate() const {
    if (values.empty()) throw std::invalid_argument("weights: empty");
    for (double w : values)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("weights: entries must be strictly positive and finite");
}

double resolve_c2(const Dataset& data, const TailParams& tail) {
    if (tail.x <= 0.0) throw std::invalid_argument("tail: x must be positive");
    if (tail.c2 < 0.0) throw std::invalid_argument("tail: c2 must be positive");
    const double c2 = tail.c2 > 0.0 ? tail.c2 : max_abs_entry(data.X);
    if (c2 <= 0.0) throw std::invalid_argument("tail: c2 must be positive (zero design?)");
    return c2;
}

namespace {

double tail_log(const Dataset& data, const TailParams& tail) {
    return tail.x + std::log(static_cast<double>(data.p()));
}

} // namespace

PenaltyWeights lasso_bernstein_weights(const Dataset& data, const TailParams& tail) {
    const double c2 = resolve_c2(data, tail);
    const double xl = tail_log(data, tail);
    const double n = static_cast<double>(data.n());
    PenaltyWeights w;
    w.mode = WeightMode::coefficient;
    w.values.resize(data.p());
    const double tail_term = 2.0 * c2 * xl / (3.0 * n);
    for (std::size_t j = 0; j < data.p(); ++j) {
        const double css = kernels::sum_sq(data.X.col(j), data.n());
        w.values[j] = (2.0 / n) * std::sqrt(0.5 * css * xl) + tail_term;
    }
    return w;
}

PenaltyWeights group_bernstein_weights(const Dataset& data, const GroupStructure& groups,
                                       const TailParams& tail) {
    if (groups.dimension() != data.p())
        throw std::invalid_argument("weights: groups do not match p");
    const double c2 = resolve_c2(data, tail);
    const double xl = tail_log(data, tail);
    const double n = static_cast<double>(data.n());
    PenaltyWeights w;
    w.mode = WeightMode::group;
    w.values.resize(groups.num_groups());
    for (std::size_t l = 0; l < groups.num_groups(); ++l) {
        double max_css = 0.0;
        for (int j : groups.group(l))
            max_css = std::max(max_css,
                               kernels::sum_sq(data.X.col(static_cast<std::size_t>(j)),
                                               data.n()));
        const double gl = static_cast<double>(groups.group(l).size());
        w.values[l] = (2.0 * gl / n) * std::sqrt(0.5 * max_css * xl) +
                      2.0 * c2 * gl * xl / (3.0 * n);
    }
    return w;
}

namespace {

void validate_variances(std::span<const double> variances, std::size_t n) {
    if (variances.size() != n)
        throw std::invalid_argument("weights: variances length mismatch");
    for (double v : variances)
        if (!(v >= 0.0) || v > 0.25 + 1e-12)
            throw std::invalid_argument("weights: variances must lie in [0, 0.25]");
}

} // namespace

PenaltyWeights group_theoretical_weights(const Dataset& data, const GroupStructure& groups,
                                         const TailParams& tail,
                                         std::span<const double> variances) {
    if (groups.dimension() != data.p())
        throw std::invalid_argument("weights: groups do not match p");
    validate_variances(variances, data.n());
    if (tail.x <= 0.0) throw std::invalid_argument("tail: x must be positive");
    const double xl = tail_log(data, tail);
    const double n = static_cast<double>(data.n());
    PenaltyWeights w;
    w.mode = WeightMode::group;
    w.values.resize(groups.num_groups());
    for (std::size_t l = 0; l < groups.num_groups(); ++l) {
        double max_term = 0.0;
        double max_abs = 0.0;
        for (int j : groups.group(l)) {
            const double* col = data.X.col(static_cast<std::size_t>(j));
            max_term = std::max(
                max_term, kernels::weighted_dot(col, col, variances.data(), data.n()));
            max_abs = std::max(max_abs, kernels::max_abs(col, data.n()));
        }
        const double gl = static_cast<double>(groups.group(l).size());
        w.values[l] = (2.0 * gl / n) * std::sqrt(2.0 * max_term * xl) +
                      (2.0 * gl * max_abs / (3.0 * n)) * xl;
    }
    return w;
}

PenaltyWeights lasso_theoretical_weights(const Dataset& data, const TailParams& tail,
                                         std::span<const double> variances) {
    PenaltyWeights w =
        group_theoretical_weights(data, GroupStructure::singletons(data.p()), tail,
                                  variances);
    w.mode = WeightMode::coefficient;
    return w;
}

PenaltyWeights unit_weights(std::size_t count, WeightMode mode) {
    return PenaltyWeights{Vector(count, 1.0), mode};
}

PenaltyWeights sqrt_size_group_weights(const GroupStructure& groups) {
    PenaltyWeights w;
    w.mode = WeightMode::group;
    w.values.resize(groups.num_groups());
    for (std::size_t l = 0; l < groups.num_groups(); ++l)
        w.values[l] = std::sqrt(static_cast<double>(groups.group(l).size()));
    return w;
}

namespace {

constexpr double kVarianceFloor = 1e-6; // saturated fits would zero the weights

Vector probabilities_to_variances(std::span<const double> f) {
    Vector out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double pi = sigmoid(f[i]);
        out[i] = std::clamp(pi * (1.0 - pi), kVarianceFloor, 0.25);
    }
    return out;
}

// Unpenalized logistic refit on the screened support. Returns the fitted
// score vector, or nullopt on divergence (separation) or a singular Hessian.
std::optional<Vector> newton_refit(const Dataset& data, const std::vector<int>& support) {
    const std::size_t n = data.n();
    const std::size_t k = support.size();
    Vector beta(k, 0.0);
    Vector f(n, 0.0);
    for (int iter = 0; iter < 50; ++iter) {
        Vector prob(n), wdiag(n);
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = sigmoid(f[i]);
            wdiag[i] = prob[i] * (1.0 - prob[i]);
        }
        Vector grad(k);
        double gmax = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            const double* col = data.X.col(static_cast<std::size_t>(support[a]));
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += col[i] * (prob[i] - data.y[i]);
            grad[a] = s / static_cast<double>(n);
            gmax = std::max(gmax, std::fabs(grad[a]));
        }
        if (gmax <= 1e-9) return f;
        std::vector<double> hess(k * k);
        for (std::size_t a = 0; a < k; ++a) {
            const double* ca = data.X.col(static_cast<std::size_t>(support[a]));
            for (std::size_t b = a; b < k; ++b) {
                const double* cb = data.X.col(static_cast<std::size_t>(support[b]));
                const double h =
                    kernels::weighted_dot(ca, cb, wdiag.data(), n) / static_cast<double>(n);
                hess[a * k + b] = h;
                hess[b * k + a] = h;
            }
        }
        Vector step = grad;
        if (!cholesky_solve(hess, step, k)) return std::nullopt;
        for (std::size_t a = 0; a < k; ++a) beta[a] -= step[a];
        std::fill(f.begin(), f.end(), 0.0);
        for (std::size_t a = 0; a < k; ++a)
            kernels::axpy(beta[a], data.X.col(static_cast<std::size_t>(support[a])),
                          f.data(), n);
        // fitted scores this large mean (near-)separation: the gradient can
        // shrink below tolerance while the MLE runs off to infinity
        if (norm_inf(f) > 30.0) return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

VarianceEstimate estimate_variances(const Dataset& data, VarianceMethod method,
                                    const CvControl& cv) {
    data.validate();
    if (data.n() < 2) throw std::invalid_argument("estimate_variances: n must be >= 2");

    // Stage 1: classical (unit-weight) lasso with r selected by CV.
    const PenaltyWeights unit = unit_weights(data.p(), WeightMode::coefficient);
    const double rmax = r_max(data, unit, nullptr);
    const Vector grid = path_grid(rmax, PathSpec{cv.grid_count, cv.r_min_ratio});
    const double selected =
        cross_validate_r(data, unit, nullptr, grid, cv.folds, cv.seed, cv.fit);

    std::vector<FitResult> path;
    {
        std::size_t upto = grid.size();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] == selected) {
                upto = i + 1;
                break;
            }
        }
        path = regularization_path_on_grid(
            data, unit, nullptr, std::span<const double>(grid.data(), upto), cv.fit);
    }
    const FitResult& stage1 = path.back();

    VarianceEstimate out;
    out.selected_r = selected;
    out.screened_support = stage1.active;
    const Vector f1 = matvec(data.X, stage1.beta);
    out.variances = probabilities_to_variances(f1);

    if (method == VarianceMethod::plugin_lasso) return out;

    // Stage 2: unpenalized logistic refit on the screened support.
    if (out.screened_support.size() >= data.n()) {
        out.fallback_used = true;
        return out;
    }
    if (out.screened_support.empty()) {
        // zero model: pi = 1/2 everywhere
        out.variances.assign(data.n(), 0.25);
        return out;
    }
    if (auto f2 = newton_refit(data, out.screened_support)) {
        out.variances = probabilities_to_variances(*f2);
    } else {
        out.fallback_used = true;
    }
    return out;
}

} // namespace slogit
