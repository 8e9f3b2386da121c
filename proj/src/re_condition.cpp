#include "slogit/re_condition.hpp"

#include "slogit/kernels.hpp"
#include "slogit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slogit {

namespace {

struct ConeContext {
    ReKind kind = ReKind::lasso;
    std::size_t p = 0;
    std::size_t units = 0;                    // p (lasso) or g (group kinds)
    std::vector<std::vector<int>> unit_cols;  // coordinates per unit
};

ConeContext make_context(std::size_t p, ReKind kind, const GroupStructure* groups) {
    ConeContext ctx;
    ctx.kind = kind;
    ctx.p = p;
    if (kind == ReKind::lasso) {
        ctx.units = p;
        ctx.unit_cols.resize(p);
        for (std::size_t j = 0; j < p; ++j) ctx.unit_cols[j] = {static_cast<int>(j)};
    } else {
        if (groups == nullptr)
            throw std::invalid_argument("re: group kinds require a group structure");
        if (groups->dimension() != p)
            throw std::invalid_argument("re: groups do not match design dimension");
        ctx.units = groups->num_groups();
        ctx.unit_cols = groups->groups();
    }
    return ctx;
}

double unit_norm(std::span<const double> delta, const std::vector<int>& cols) {
    if (cols.size() == 1) return std::fabs(delta[static_cast<std::size_t>(cols[0])]);
    double s = 0.0;
    for (int j : cols) {
        const double v = delta[static_cast<std::size_t>(j)];
        s += v * v;
    }
    return std::sqrt(s);
}

// l1 (lasso) or l2,1 (group) cone norms restricted on/off the index set.
void cone_norms(std::span<const double> delta, const ConeContext& ctx,
                const std::vector<char>& in_K, double& on, double& off) {
    on = 0.0;
    off = 0.0;
    for (std::size_t u = 0; u < ctx.units; ++u) {
        const double nu = unit_norm(delta, ctx.unit_cols[u]);
        (in_K[u] ? on : off) += nu;
    }
}

bool feasible(std::span<const double> delta, const ConeContext& ctx,
              const std::vector<char>& in_K, double a0) {
    double on, off;
    cone_norms(delta, ctx, in_K, on, off);
    return off <= a0 * on * (1.0 + 1e-12) + 1e-300;
}

// Scales the off-K part down to the cone boundary if it protrudes.
void project_to_cone(std::span<double> delta, const ConeContext& ctx,
                     const std::vector<char>& in_K, double a0) {
    double on, off;
    cone_norms(delta, ctx, in_K, on, off);
    const double cap = a0 * on;
    if (off <= cap) return;
    const double scale = off > 0.0 ? cap / off * (1.0 - 1e-12) : 0.0;
    for (std::size_t u = 0; u < ctx.units; ++u) {
        if (in_K[u]) continue;
        for (int j : ctx.unit_cols[u]) delta[static_cast<std::size_t>(j)] *= scale;
    }
}

// Rayleigh-type ratio against a precomputed Gram matrix:
//   rho(d) = d^T G d / ||d_K||_2^2 with G = X^T X / n (or X^T D X / n).
// The reported constant is sqrt(rho) for the unsquared kinds.
struct RatioEvaluator {
    const std::vector<double>& gram; // p x p row-major
    std::size_t p;
    std::uint64_t evals = 0;

    double quad(std::span<const double> d) {
        double s = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            if (d[i] != 0.0) s += d[i] * kernels::dot(gram.data() + i * p, d.data(), p);
        }
        return s;
    }

    // returns rho, or a negative value when ||d_K|| vanishes
    double rho(std::span<const double> d, const ConeContext& ctx,
               const std::vector<char>& in_K) {
        double den = 0.0;
        for (std::size_t u = 0; u < ctx.units; ++u) {
            if (!in_K[u]) continue;
            for (int j : ctx.unit_cols[u]) {
                const double v = d[static_cast<std::size_t>(j)];
                den += v * v;
            }
        }
        if (den <= 1e-300) return -1.0;
        ++evals;
        return std::max(0.0, quad(d) / den);
    }
};

struct Best {
    double rho = std::numeric_limits<double>::infinity();
    Vector delta;
    std::vector<int> K;
};

void consider(Best& best, double rho, std::span<const double> d,
              const std::vector<int>& K) {
    if (rho >= 0.0 && rho < best.rho) {
        best.rho = rho;
        best.delta.assign(d.begin(), d.end());
        best.K = K;
    }
}

void normalize(Vector& d) {
    const double nv = norm2(d);
    if (nv > 0.0) {
        for (double& x : d) x /= nv;
    }
}

void descend(Vector& d, double& rho, RatioEvaluator& ev, const ConeContext& ctx,
             const std::vector<char>& in_K, const std::vector<int>& K, double a0,
             int steps, Best& best) {
    if (rho < 0.0 || steps <= 0) return;
    const std::size_t p = ctx.p;
    Vector grad(p), trial(p), gtmp(p);
    double eta = 0.1;
    for (int step = 0; step < steps; ++step) {
        // grad rho = (2/den)(G d - rho * d_K); den is absorbed into the step.
        for (std::size_t i = 0; i < p; ++i)
            gtmp[i] = kernels::dot(ev.gram.data() + i * p, d.data(), p);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < p; ++i) grad[i] = gtmp[i];
        for (int u : K)
            for (int j : ctx.unit_cols[static_cast<std::size_t>(u)])
                grad[static_cast<std::size_t>(j)] -= rho * d[static_cast<std::size_t>(j)];
        const double gn = norm2(grad);
        if (gn <= 1e-15) break;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            for (std::size_t i = 0; i < p; ++i) trial[i] = d[i] - eta * grad[i] / gn;
            project_to_cone(trial, ctx, in_K, a0);
            normalize(trial);
            const double r2 = ev.rho(trial, ctx, in_K);
            if (r2 >= 0.0 && r2 < rho) {
                d = trial;
                rho = r2;
                consider(best, rho, d, K);
                eta = std::min(eta * 1.5, 1.0);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
    }
}

template <typename Fn>
void for_each_subset(std::size_t units, int s, Fn&& fn) {
    std::vector<int> combo;
    for (int k = 1; k <= s; ++k) {
        combo.resize(static_cast<std::size_t>(k));
        std::iota(combo.begin(), combo.end(), 0);
        while (true) {
            fn(combo);
            int i = k - 1;
            while (i >= 0 &&
                   combo[static_cast<std::size_t>(i)] ==
                       static_cast<int>(units) - k + i)
                --i;
            if (i < 0) break;
            ++combo[static_cast<std::size_t>(i)];
            for (int t = i + 1; t < k; ++t)
                combo[static_cast<std::size_t>(t)] = combo[static_cast<std::size_t>(t - 1)] + 1;
        }
    }
}

std::size_t subset_count(std::size_t units, int s) {
    // sum_{k<=s} C(units, k), saturating
    long double total = 0.0L;
    for (int k = 1; k <= s; ++k) {
        long double c = 1.0L;
        for (int t = 0; t < k; ++t)
            c = c * static_cast<long double>(units - static_cast<std::size_t>(t)) /
                static_cast<long double>(t + 1);
        total += c;
        if (total > 1e18L) return static_cast<std::size_t>(-1);
    }
    return static_cast<std::size_t>(total);
}

} // namespace

bool cone_membership(std::span<const double> delta, const std::vector<int>& K, double a0,
                     ReKind kind, const GroupStructure* groups) {
    if (K.empty()) throw std::invalid_argument("cone_membership: empty index set");
    if (a0 <= 0.0) throw std::invalid_argument("cone_membership: a0 must be positive");
    const ConeContext ctx = make_context(delta.size(), kind, groups);
    std::vector<char> in_K(ctx.units, 0);
    for (int u : K) {
        if (u < 0 || static_cast<std::size_t>(u) >= ctx.units)
            throw std::invalid_argument("cone_membership: index out of range");
        in_K[static_cast<std::size_t>(u)] = 1;
    }
    return feasible(delta, ctx, in_K, a0);
}

ReEstimate re_constant(const Matrix& X, const ReQuery& query, const ReBudget& budget,
                       std::span<const Vector> warm_starts) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    if (n == 0 || p == 0) throw std::invalid_argument("re: empty design");
    if (query.a0 <= 0.0) throw std::invalid_argument("re: a0 must be positive");
    const GroupStructure* groups =
        query.groups.has_value() ? &query.groups.value() : nullptr;
    const ConeContext ctx = make_context(p, query.kind, groups);
    if (query.s < 1 || static_cast<std::size_t>(query.s) > ctx.units)
        throw std::invalid_argument("re: s out of range");

    const bool weighted = query.kind == ReKind::weighted_group;
    if (weighted) {
        if (!query.variances.has_value() || query.variances->size() != n)
            throw std::invalid_argument("re: weighted_group requires variances of length n");
        for (double v : *query.variances)
            if (!(v >= 0.0) || v > 0.25 + 1e-12)
                throw std::invalid_argument("re: variances must lie in [0, 0.25]");
    }

    // Gram matrix G = X^T X / n, or X^T D X / n for the weighted kind.
    std::vector<double> gram(p * p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            const double g =
                (weighted ? kernels::weighted_dot(X.col(a), X.col(b),
                                                  query.variances->data(), n)
                          : kernels::dot(X.col(a), X.col(b), n)) /
                static_cast<double>(n);
            gram[a * p + b] = g;
            gram[b * p + a] = g;
        }
    }
    RatioEvaluator ev{gram, p};

    std::vector<std::vector<int>> subsets;
    const std::size_t count = subset_count(ctx.units, query.s);
    if (count <= budget.max_subsets) {
        subsets.reserve(count);
        for_each_subset(ctx.units, query.s,
                        [&](const std::vector<int>& K) { subsets.push_back(K); });
    } else if (budget.allow_subset_sampling) {
        auto rng = make_rng(budget.seed, 0x5u);
        std::vector<int> pool(ctx.units);
        std::iota(pool.begin(), pool.end(), 0);
        for (int t = 0; t < budget.sampled_subsets; ++t) {
            for (int k = 0; k < query.s; ++k) {
                std::uniform_int_distribution<int> pick(k, static_cast<int>(ctx.units) - 1);
                std::swap(pool[static_cast<std::size_t>(k)],
                          pool[static_cast<std::size_t>(pick(rng))]);
            }
            std::vector<int> K(pool.begin(), pool.begin() + query.s);
            std::sort(K.begin(), K.end());
            subsets.push_back(std::move(K));
        }
    } else {
        throw std::invalid_argument(
            "re: subset enumeration infeasible (" + std::to_string(count) +
            " subsets); enable subset sampling to override");
    }

    Best best;
    Vector d(p);
    std::vector<char> in_K(ctx.units);

    for (std::size_t si = 0; si < subsets.size(); ++si) {
        const std::vector<int>& K = subsets[si];
        std::fill(in_K.begin(), in_K.end(), 0);
        std::vector<int> k_coords;
        for (int u : K) {
            in_K[static_cast<std::size_t>(u)] = 1;
            for (int j : ctx.unit_cols[static_cast<std::size_t>(u)]) k_coords.push_back(j);
        }

        Best local;

        // Coordinate candidates supported on K (always cone-feasible).
        for (int j : k_coords) {
            std::fill(d.begin(), d.end(), 0.0);
            d[static_cast<std::size_t>(j)] = 1.0;
            const double r = ev.rho(d, ctx, in_K);
            consider(local, r, d, K);
        }
        // Signed pairs e_a +- e_b, a on K: exact witnesses for (anti)duplicated
        // columns. Feasibility depends on a0, so each candidate is checked.
        for (int a : k_coords) {
            for (std::size_t b = 0; b < p; ++b) {
                if (static_cast<int>(b) == a) continue;
                for (double sgn : {1.0, -1.0}) {
                    std::fill(d.begin(), d.end(), 0.0);
                    d[static_cast<std::size_t>(a)] = 1.0;
                    d[b] += sgn;
                    if (!feasible(d, ctx, in_K, query.a0)) continue;
                    const double r = ev.rho(d, ctx, in_K);
                    consider(local, r, d, K);
                }
            }
        }
        // Random cone directions with uniformly drawn boundary fractions.
        auto rng = make_rng(budget.seed, 0x100000u + si);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int t = 0; t < budget.directions; ++t) {
            for (std::size_t j = 0; j < p; ++j) d[j] = normal(rng);
            double on, off;
            cone_norms(d, ctx, in_K, on, off);
            if (on <= 1e-300) continue;
            const double target = unif(rng) * query.a0 * on;
            const double scale = off > 0.0 ? target / off : 0.0;
            for (std::size_t u = 0; u < ctx.units; ++u) {
                if (in_K[u]) continue;
                for (int j : ctx.unit_cols[u]) d[static_cast<std::size_t>(j)] *= scale;
            }
            const double r = ev.rho(d, ctx, in_K);
            consider(local, r, d, K);
        }
        // Caller-provided directions (nested-query warm starts).
        for (const Vector& w : warm_starts) {
            if (w.size() != p) continue;
            if (!feasible(w, ctx, in_K, query.a0)) continue;
            const double r = ev.rho(w, ctx, in_K);
            consider(local, r, w, K);
        }

        if (local.delta.empty()) continue;
        consider(best, local.rho, local.delta, K);
        Vector refine = local.delta;
        normalize(refine);
        double rho = local.rho;
        descend(refine, rho, ev, ctx, in_K, K, query.a0, budget.descent_steps, best);
    }

    ReEstimate out;
    out.budget_used = ev.evals;
    out.certified_upper = true;
    if (best.delta.empty()) {
        out.value = 0.0;
        return out;
    }
    normalize(best.delta);
    out.witness = std::move(best.delta);
    out.witness_index_set = best.K;
    out.value = weighted ? best.rho : std::sqrt(best.rho);
    return out;
}

} // namespace slogit
