#include "slogit/solver.hpp"

#include "slogit/kernels.hpp"
#include "slogit/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slogit {

double soft_threshold(double u, double t) noexcept {
    if (u > t) return u - t;
    if (u < -t) return u + t;
    return 0.0;
}

void group_soft_threshold(std::span<double> v, double t) noexcept {
    const double nv = std::sqrt(kernels::sum_sq(v.data(), v.size()));
    if (nv <= t) {
        std::fill(v.begin(), v.end(), 0.0);
        return;
    }
    const double scale = 1.0 - t / nv;
    for (double& x : v) x *= scale;
}

namespace {

constexpr double kCurvatureCap = 0.25; // global bound on pi(1-pi)
constexpr double kCurvatureFloor = 1e-4;

// Column indices per block plus the spectral curvature bound
// lip_b = lambda_max(X_b^T X_b) / n.
struct BlockLayout {
    std::vector<std::vector<int>> blocks;
    std::vector<double> lip;
    bool group_mode = false;
};

BlockLayout make_layout(const Matrix& X, const GroupStructure* groups) {
    BlockLayout layout;
    const std::size_t n = X.rows();
    if (groups == nullptr) {
        layout.blocks.resize(X.cols());
        layout.lip.resize(X.cols());
        for (std::size_t j = 0; j < X.cols(); ++j) {
            layout.blocks[j] = {static_cast<int>(j)};
            layout.lip[j] = kernels::sum_sq(X.col(j), n) / static_cast<double>(n);
        }
        return layout;
    }
    layout.group_mode = true;
    layout.blocks = groups->groups();
    layout.lip.resize(layout.blocks.size());
    for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
        const auto& cols = layout.blocks[b];
        const std::size_t k = cols.size();
        if (k == 1) {
            layout.lip[b] = kernels::sum_sq(X.col(cols[0]), n) / static_cast<double>(n);
            continue;
        }
        std::vector<double> gram(k * k);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t c = a; c < k; ++c) {
                const double d = kernels::dot(X.col(cols[a]), X.col(cols[c]), n);
                gram[a * k + c] = d;
                gram[c * k + a] = d;
            }
        }
        // power iteration can stop marginally below lambda_max; pad
        layout.lip[b] = sym_max_eigenvalue(gram, k) * (1.0 + 1e-9) / static_cast<double>(n);
    }
    return layout;
}

double penalty_value(std::span<const double> beta, const BlockLayout& layout,
                     const PenaltyWeights& w, double r) {
    double s = 0.0;
    for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
        const auto& cols = layout.blocks[b];
        double nb;
        if (cols.size() == 1) {
            nb = std::fabs(beta[static_cast<std::size_t>(cols[0])]);
        } else {
            nb = group_norm(beta, cols);
        }
        s += w.values[b] * nb;
    }
    return r * s;
}

double kkt_from_gradient(std::span<const double> grad, std::span<const double> beta,
                         const BlockLayout& layout, const PenaltyWeights& w, double r) {
    double worst = 0.0;
    std::vector<double> gb;
    for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
        const auto& cols = layout.blocks[b];
        const double rw = r * w.values[b];
        double viol;
        if (cols.size() == 1) {
            const auto j = static_cast<std::size_t>(cols[0]);
            viol = beta[j] != 0.0
                       ? std::fabs(grad[j] + rw * (beta[j] > 0.0 ? 1.0 : -1.0))
                       : std::max(0.0, std::fabs(grad[j]) - rw);
        } else {
            gb.assign(cols.size(), 0.0);
            double bn = 0.0;
            for (std::size_t t = 0; t < cols.size(); ++t) {
                const auto j = static_cast<std::size_t>(cols[t]);
                gb[t] = grad[j];
                bn += beta[j] * beta[j];
            }
            bn = std::sqrt(bn);
            if (bn > 0.0) {
                double s = 0.0;
                for (std::size_t t = 0; t < cols.size(); ++t) {
                    const auto j = static_cast<std::size_t>(cols[t]);
                    const double v = gb[t] + rw * beta[j] / bn;
                    s += v * v;
                }
                viol = std::sqrt(s);
            } else {
                viol = std::max(0.0, norm2(gb) - rw);
            }
        }
        worst = std::max(worst, viol);
    }
    return worst;
}

FitResult fit_core(const Dataset& data, const BlockLayout& layout,
                   const PenaltyWeights& weights, double r, const FitConfig& cfg,
                   const Vector* warm_start) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    const std::size_t nb = layout.blocks.size();
    if (weights.values.size() != nb)
        throw std::invalid_argument("fit: weights length does not match block count");
    weights.validate();
    if (r < 0.0) throw std::invalid_argument("fit: r must be nonnegative");
    if (cfg.tol <= 0.0 || cfg.max_iter < 1)
        throw std::invalid_argument("fit: invalid FitConfig");

    Vector beta(p, 0.0);
    if (warm_start != nullptr) {
        if (warm_start->size() != p)
            throw std::invalid_argument("fit: warm start dimension mismatch");
        beta = *warm_start;
    }
    double intercept = 0.0;

    Vector f = matvec(data.X, beta);
    double loss = empirical_risk_at(f, data);
    double obj = loss + penalty_value(beta, layout, weights, r);
    if (cfg.objective_trace) cfg.objective_trace->push_back(obj);

    Vector resid(n), grad(p), v(n), fnew(n), wbeta, qb, cand;
    std::vector<char> block_active(nb, 1);

    double curvature =
        std::clamp(kCurvatureCap / std::max(cfg.initial_step, 1e-12), kCurvatureFloor,
                   kCurvatureCap);

    bool converged = false;
    double kkt = 0.0;
    int iter = 0;
    bool stalled = false;

    for (iter = 0; iter < cfg.max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = sigmoid(f[i]) - data.y[i];
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < p; ++j)
            grad[j] = kernels::dot(data.X.col(j), resid.data(), n) * inv_n;
        const double g0 = cfg.use_intercept ? kernels::sum(resid.data(), n) * inv_n : 0.0;

        kkt = kkt_from_gradient(grad, beta, layout, weights, r);
        if (cfg.use_intercept) kkt = std::max(kkt, std::fabs(g0));
        if (kkt <= cfg.tol) {
            converged = true;
            break;
        }

        // Propose a step from the quadratic model at the current curvature;
        // grow the curvature until the model upper-bounds the realized loss.
        bool accepted = false;
        for (int attempt = 0; attempt < 64 && !accepted; ++attempt) {
            wbeta = beta;
            double wint = intercept;
            std::fill(v.begin(), v.end(), 0.0); // v = X(wbeta-beta) + (wint-intercept)
            std::fill(block_active.begin(), block_active.end(), 1);

            for (int sweep = 0; sweep < std::max(1, cfg.inner_sweeps); ++sweep) {
                double max_move = 0.0;
                const bool full_sweep = sweep == 0;
                if (cfg.use_intercept) {
                    const double q0 = g0 + curvature * kernels::sum(v.data(), n) * inv_n;
                    const double d0 = -q0 / curvature;
                    if (d0 != 0.0) {
                        wint += d0;
                        for (std::size_t i = 0; i < n; ++i) v[i] += d0;
                        max_move = std::max(max_move, std::fabs(d0));
                    }
                }
                for (std::size_t b = 0; b < nb; ++b) {
                    if (!full_sweep && !block_active[b]) continue;
                    const auto& cols = layout.blocks[b];
                    const double t = curvature * layout.lip[b];
                    const double rw = r * weights.values[b];
                    if (t <= 0.0) {
                        // zero block of X: loss ignores it, penalty pins it at 0
                        if (rw > 0.0) {
                            for (int cj : cols) {
                                const auto j = static_cast<std::size_t>(cj);
                                if (wbeta[j] != 0.0) {
                                    kernels::axpy(-wbeta[j], data.X.col(j), v.data(), n);
                                    wbeta[j] = 0.0;
                                }
                            }
                        }
                        block_active[b] = 0;
                        continue;
                    }
                    if (cols.size() == 1) {
                        const auto j = static_cast<std::size_t>(cols[0]);
                        const double q =
                            grad[j] +
                            curvature * kernels::dot(data.X.col(j), v.data(), n) * inv_n;
                        const double next = soft_threshold(wbeta[j] - q / t, rw / t);
                        const double d = next - wbeta[j];
                        if (d != 0.0) {
                            wbeta[j] = next;
                            kernels::axpy(d, data.X.col(j), v.data(), n);
                            max_move = std::max(max_move, std::fabs(d));
                        }
                        block_active[b] = next != 0.0 || d != 0.0;
                    } else {
                        const std::size_t k = cols.size();
                        qb.resize(k);
                        cand.resize(k);
                        for (std::size_t c = 0; c < k; ++c) {
                            const auto j = static_cast<std::size_t>(cols[c]);
                            qb[c] = grad[j] +
                                    curvature * kernels::dot(data.X.col(j), v.data(), n) *
                                        inv_n;
                            cand[c] = wbeta[j] - qb[c] / t;
                        }
                        group_soft_threshold(cand, rw / t);
                        bool moved = false;
                        bool nonzero = false;
                        for (std::size_t c = 0; c < k; ++c) {
                            const auto j = static_cast<std::size_t>(cols[c]);
                            const double d = cand[c] - wbeta[j];
                            if (d != 0.0) {
                                wbeta[j] = cand[c];
                                kernels::axpy(d, data.X.col(j), v.data(), n);
                                max_move = std::max(max_move, std::fabs(d));
                                moved = true;
                            }
                            nonzero = nonzero || cand[c] != 0.0;
                        }
                        block_active[b] = moved || nonzero;
                    }
                }
                if (max_move <= 1e-12 * (1.0 + norm_inf(wbeta))) break;
            }

            const double lin = kernels::dot(resid.data(), v.data(), n) * inv_n;
            const double quad = cfg.sufficient_decrease * curvature *
                                kernels::sum_sq(v.data(), n) * 0.5 * inv_n;
            for (std::size_t i = 0; i < n; ++i) fnew[i] = f[i] + v[i];
            const double new_loss = empirical_risk_at(fnew, data);
            const double slack = 1e-12 * (1.0 + std::fabs(loss));

            if (new_loss <= loss + lin + quad + slack) {
                const double new_obj = new_loss + penalty_value(wbeta, layout, weights, r);
                beta.swap(wbeta);
                intercept = wint;
                f.swap(fnew);
                loss = new_loss;
                obj = new_obj;
                if (cfg.objective_trace) cfg.objective_trace->push_back(obj);
                if (attempt == 0)
                    curvature = std::max(kCurvatureFloor, curvature * 0.7);
                accepted = true;
            } else if (curvature >= kCurvatureCap) {
                // Only reachable with sufficient_decrease < 1; take the move if
                // it still lowers the objective, else stop making progress.
                const double new_obj = new_loss + penalty_value(wbeta, layout, weights, r);
                if (new_obj <= obj + slack) {
                    beta.swap(wbeta);
                    intercept = wint;
                    f.swap(fnew);
                    loss = new_loss;
                    obj = new_obj;
                    if (cfg.objective_trace) cfg.objective_trace->push_back(obj);
                    accepted = true;
                } else {
                    stalled = true;
                    break;
                }
            } else {
                curvature = std::min(kCurvatureCap, curvature / cfg.step_shrink);
            }
        }
        if (stalled || !accepted) break;
    }

    FitResult out;
    out.beta = std::move(beta);
    out.intercept = intercept;
    out.r = r;
    out.iterations = iter;
    out.kkt_residual = kkt;
    out.converged = converged;
    out.objective = empirical_risk_at(f, data) + penalty_value(out.beta, layout, weights, r);
    if (layout.group_mode) {
        for (std::size_t b = 0; b < nb; ++b)
            if (group_norm(out.beta, layout.blocks[b]) != 0.0)
                out.active.push_back(static_cast<int>(b));
    } else {
        out.active = support(out.beta);
    }
    return out;
}

Vector gradient_at_zero(const Dataset& data) {
    Vector resid(data.n());
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = 0.5 - data.y[i];
    Vector g = matvec_transpose(data.X, resid);
    const double inv_n = 1.0 / static_cast<double>(data.n());
    for (double& x : g) x *= inv_n;
    return g;
}

} // namespace

FitResult fit_lasso(const Dataset& data, const PenaltyWeights& weights, double r,
                    const FitConfig& cfg, const Vector* warm_start) {
    data.validate();
    if (weights.mode != WeightMode::coefficient)
        throw std::invalid_argument("fit_lasso: weights must be coefficient-mode");
    return fit_core(data, make_layout(data.X, nullptr), weights, r, cfg, warm_start);
}

FitResult fit_group_lasso(const Dataset& data, const GroupStructure& groups,
                          const PenaltyWeights& weights, double r, const FitConfig& cfg,
                          const Vector* warm_start) {
    data.validate();
    if (groups.dimension() != data.p())
        throw std::invalid_argument("fit_group_lasso: groups do not match p");
    if (weights.mode != WeightMode::group)
        throw std::invalid_argument("fit_group_lasso: weights must be group-mode");
    return fit_core(data, make_layout(data.X, &groups), weights, r, cfg, warm_start);
}

double kkt_residual(std::span<const double> beta, const Dataset& data,
                    const GroupStructure* groups, const PenaltyWeights& weights,
                    double r) {
    if (beta.size() != data.p()) throw std::invalid_argument("kkt_residual: dim mismatch");
    BlockLayout layout;
    if (groups == nullptr) {
        layout.blocks.resize(data.p());
        for (std::size_t j = 0; j < data.p(); ++j)
            layout.blocks[j] = {static_cast<int>(j)};
    } else {
        layout.blocks = groups->groups();
        layout.group_mode = true;
    }
    if (weights.values.size() != layout.blocks.size())
        throw std::invalid_argument("kkt_residual: weights length mismatch");
    Vector grad = risk_gradient(beta, data);
    return kkt_from_gradient(grad, beta, layout, weights, r);
}

double r_max(const Dataset& data, const PenaltyWeights& weights,
             const GroupStructure* groups) {
    weights.validate();
    Vector g = gradient_at_zero(data);
    double best = 0.0;
    if (groups == nullptr) {
        if (weights.values.size() != data.p())
            throw std::invalid_argument("r_max: weights length mismatch");
        for (std::size_t j = 0; j < data.p(); ++j)
            best = std::max(best, std::fabs(g[j]) / weights.values[j]);
    } else {
        if (weights.values.size() != groups->num_groups())
            throw std::invalid_argument("r_max: weights length mismatch");
        for (std::size_t l = 0; l < groups->num_groups(); ++l)
            best = std::max(best, group_norm(g, groups->group(l)) / weights.values[l]);
    }
    return best;
}

Vector path_grid(double rmax, const PathSpec& spec) {
    if (spec.count < 1) throw std::invalid_argument("path: count must be >= 1");
    if (spec.r_min_ratio <= 0.0 || spec.r_min_ratio >= 1.0)
        throw std::invalid_argument("path: r_min_ratio must be in (0,1)");
    Vector grid(static_cast<std::size_t>(spec.count));
    if (spec.count == 1) {
        grid[0] = rmax;
        return grid;
    }
    const double log_ratio = std::log(spec.r_min_ratio);
    for (int i = 0; i < spec.count; ++i)
        grid[static_cast<std::size_t>(i)] =
            rmax * std::exp(log_ratio * static_cast<double>(i) /
                            static_cast<double>(spec.count - 1));
    return grid;
}

std::vector<FitResult> regularization_path_on_grid(const Dataset& data,
                                                   const PenaltyWeights& weights,
                                                   const GroupStructure* groups,
                                                   std::span<const double> grid,
                                                   const FitConfig& cfg) {
    data.validate();
    const BlockLayout layout = make_layout(data.X, groups);
    std::vector<FitResult> out;
    out.reserve(grid.size());
    const Vector* warm = nullptr;
    for (double r : grid) {
        out.push_back(fit_core(data, layout, weights, r, cfg, warm));
        warm = &out.back().beta;
    }
    return out;
}

std::vector<FitResult> regularization_path(const Dataset& data,
                                           const PenaltyWeights& weights,
                                           const GroupStructure* groups,
                                           const PathSpec& spec, const FitConfig& cfg) {
    const double rmax = r_max(data, weights, groups);
    return regularization_path_on_grid(data, weights, groups, path_grid(rmax, spec), cfg);
}

} // namespace slogit
