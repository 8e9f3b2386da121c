#include "slogit/simulation.hpp"

#include "slogit/kernels.hpp"
#include "slogit/model.hpp"
#include "slogit/oracle_bounds.hpp"
#include "slogit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace slogit {

double cross_validate_r(const Dataset& data, const PenaltyWeights& weights,
                        const GroupStructure* groups, std::span<const double> grid,
                        int folds, std::uint64_t seed, const FitConfig& cfg,
                        Vector* mean_deviance_out) {
    data.validate();
    if (grid.empty()) throw std::invalid_argument("cv: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
            throw std::invalid_argument("cv: grid values must be finite and nonnegative");
        if (i > 0 && grid[i] > grid[i - 1] * (1.0 + 1e-12))
            throw std::invalid_argument("cv: grid must be non-increasing");
    }
    if (folds < 2 || static_cast<std::size_t>(folds) > data.n())
        throw std::invalid_argument("cv: folds must be in [2, n]");

    const std::size_t n = data.n();
    const std::size_t p = data.p();

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::vector<int> fold_of(n, 0);
    {
        std::vector<std::size_t> by_class[2];
        for (std::size_t i = 0; i < n; ++i)
            by_class[data.y[i] == 1.0 ? 1 : 0].push_back(i);
        auto rng = make_rng(seed, 0xCF01u);
        for (auto& cls : by_class) {
            std::shuffle(cls.begin(), cls.end(), rng);
            for (std::size_t t = 0; t < cls.size(); ++t)
                fold_of[cls[t]] = static_cast<int>(t % static_cast<std::size_t>(folds));
        }
    }

    Vector total_deviance(grid.size(), 0.0);
    for (int k = 0; k < folds; ++k) {
        std::vector<std::size_t> train_rows, held_rows;
        for (std::size_t i = 0; i < n; ++i)
            (fold_of[i] == k ? held_rows : train_rows).push_back(i);
        if (train_rows.empty() || held_rows.empty()) continue;

        Dataset train;
        train.X = Matrix(train_rows.size(), p);
        train.y.resize(train_rows.size());
        for (std::size_t j = 0; j < p; ++j) {
            const double* src = data.X.col(j);
            double* dst = train.X.col(j);
            for (std::size_t t = 0; t < train_rows.size(); ++t) dst[t] = src[train_rows[t]];
        }
        for (std::size_t t = 0; t < train_rows.size(); ++t)
            train.y[t] = data.y[train_rows[t]];

        const std::vector<FitResult> path =
            regularization_path_on_grid(train, weights, groups, grid, cfg);
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const Vector& beta = path[gi].beta;
            double dev = 0.0;
            for (std::size_t idx : held_rows) {
                double f = 0.0;
                for (std::size_t j = 0; j < p; ++j)
                    if (beta[j] != 0.0) f += data.X(idx, j) * beta[j];
                dev += data.y[idx] == 1.0 ? log1pexp(-f) : log1pexp(f);
            }
            total_deviance[gi] += dev;
        }
    }

    for (double& d : total_deviance) d /= static_cast<double>(n);
    if (mean_deviance_out) *mean_deviance_out = total_deviance;

    // Strict improvement required, so ties resolve to the larger r.
    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi)
        if (total_deviance[gi] < total_deviance[best]) best = gi;
    return grid[best];
}

std::size_t SimSpec::dimension() const {
    if (mode == SimMode::lasso) return p;
    return 3 * relevant_group_size + (num_groups - 3) * irrelevant_group_size;
}

Vector SimSpec::beta0() const {
    if (mode == SimMode::lasso) {
        if (p < 3) throw std::invalid_argument("sim: lasso mode needs p >= 3");
        Vector b(p, 0.0);
        b[0] = 1.5;
        b[1] = -1.0;
        b[2] = 2.0;
        return b;
    }
    if (num_groups < 3) throw std::invalid_argument("sim: group mode needs g >= 3");
    Vector b(dimension(), 0.0);
    const double vals[3] = {1.0, -1.5, 2.0};
    for (std::size_t g = 0; g < 3; ++g)
        for (std::size_t t = 0; t < relevant_group_size; ++t)
            b[g * relevant_group_size + t] = vals[g];
    return b;
}

GroupStructure SimSpec::make_groups() const {
    if (mode != SimMode::group) throw std::invalid_argument("sim: not a group spec");
    if (num_groups < 3) throw std::invalid_argument("sim: group mode needs g >= 3");
    std::vector<int> sizes(num_groups, static_cast<int>(irrelevant_group_size));
    for (std::size_t g = 0; g < 3; ++g) sizes[g] = static_cast<int>(relevant_group_size);
    return GroupStructure::contiguous(sizes);
}

Dataset generate_linear_logistic(const SimSpec& spec, int replicate) {
    const std::size_t n = spec.n;
    const std::size_t dim = spec.dimension();
    if (n < 1 || dim < 1) throw std::invalid_argument("sim: empty dimensions");
    auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(replicate));
    std::normal_distribution<double> normal(0.0, 1.0);
    Dataset data;
    data.X = Matrix(n, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        double* col = data.X.col(j);
        for (std::size_t i = 0; i < n; ++i) col[i] = normal(rng);
    }
    const Vector b0 = spec.beta0();
    data.f0 = matvec(data.X, b0);
    data.y.resize(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        data.y[i] = unif(rng) < sigmoid((*data.f0)[i]) ? 1.0 : 0.0;
    return data;
}

Vector event_statistics(const Dataset& data, const GroupStructure* groups) {
    if (!data.has_f0()) throw std::invalid_argument("event: f0 required");
    const std::size_t n = data.n();
    Vector eps(n);
    for (std::size_t i = 0; i < n; ++i) eps[i] = data.y[i] - sigmoid((*data.f0)[i]);
    Vector t(data.p());
    for (std::size_t j = 0; j < data.p(); ++j)
        t[j] = kernels::dot(data.X.col(j), eps.data(), n);
    const double inv_n = 1.0 / static_cast<double>(n);
    if (groups == nullptr) {
        for (double& v : t) v = std::fabs(v) * inv_n;
        return t;
    }
    Vector z(groups->num_groups());
    for (std::size_t l = 0; l < groups->num_groups(); ++l) {
        double s = 0.0;
        for (int j : groups->group(l)) s += t[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j)];
        z[l] = std::sqrt(s) * inv_n;
    }
    return z;
}

bool event_holds(std::span<const double> stats, double r, const PenaltyWeights& weights) {
    if (stats.size() != weights.values.size())
        throw std::invalid_argument("event: stats/weights length mismatch");
    for (std::size_t u = 0; u < stats.size(); ++u)
        if (stats[u] > r * weights.values[u] / 2.0) return false;
    return true;
}

bool event_A_holds(const Dataset& data, double r, const PenaltyWeights& weights,
                   const GroupStructure* groups) {
    return event_holds(event_statistics(data, groups), r, weights);
}

Metrics compute_metrics(const FitResult& fit, std::span<const double> beta0,
                        const Dataset& data, const GroupStructure* groups) {
    if (fit.beta.size() != beta0.size() || beta0.size() != data.p())
        throw std::invalid_argument("metrics: dimension mismatch");
    Metrics m;
    double es = 0.0;
    for (std::size_t j = 0; j < beta0.size(); ++j) {
        const double d = fit.beta[j] - beta0[j];
        es += d * d;
    }
    m.estimation_error = std::sqrt(es);
    m.prediction_error =
        empirical_norm_sq(matvec(data.X, fit.beta), matvec(data.X, beta0));

    if (groups == nullptr) {
        const std::vector<int> s_hat = support(fit.beta);
        const std::vector<int> s_true = support(beta0);
        m.true_selection = s_hat == s_true;
        std::size_t bad = 0;
        for (std::size_t j = 0; j < beta0.size(); ++j)
            if ((fit.beta[j] != 0.0) != (beta0[j] != 0.0)) ++bad;
        m.false_rate = static_cast<double>(bad) / static_cast<double>(beta0.size());
    } else {
        const std::vector<int> s_hat = group_support(fit.beta, *groups);
        const std::vector<int> s_true = group_support(beta0, *groups);
        m.true_selection = s_hat == s_true;
        std::size_t bad = 0;
        for (std::size_t l = 0; l < groups->num_groups(); ++l) {
            const bool rel_hat = group_norm(fit.beta, groups->group(l)) != 0.0;
            const bool rel_true = group_norm(beta0, groups->group(l)) != 0.0;
            if (rel_hat != rel_true) ++bad;
        }
        m.false_rate = static_cast<double>(bad) / static_cast<double>(groups->num_groups());
    }
    return m;
}

std::string method_label(SimMode mode, WeightMethod method) {
    const bool group = mode == SimMode::group;
    switch (method) {
        case WeightMethod::unweighted: return group ? "GL" : "Lasso";
        case WeightMethod::bernstein: return group ? "weight.GL" : "weight.Bernstein";
        case WeightMethod::theoretical:
            return group ? "weight.theoretical.GL" : "weight.theoretical";
        case WeightMethod::plugin_lasso: return group ? "weight.Lasso.GL" : "weight.Lasso";
        case WeightMethod::plugin_logit: return group ? "weight.Logit.GL" : "weight.Logit";
    }
    return "?";
}

namespace {

Vector true_variances(const Dataset& data) {
    Vector v(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double pi = sigmoid((*data.f0)[i]);
        v[i] = std::clamp(pi * (1.0 - pi), 0.0, 0.25);
    }
    return v;
}

PenaltyWeights weights_for_method(const SimSpec& spec, const Dataset& data,
                                  const GroupStructure* groups, WeightMethod method,
                                  int replicate) {
    const TailParams tail{spec.x, 0.0};
    const bool group = groups != nullptr;
    switch (method) {
        case WeightMethod::unweighted:
            return group ? sqrt_size_group_weights(*groups)
                         : unit_weights(data.p(), WeightMode::coefficient);
        case WeightMethod::bernstein:
            return group ? group_bernstein_weights(data, *groups, tail)
                         : lasso_bernstein_weights(data, tail);
        case WeightMethod::theoretical: {
            const Vector v = true_variances(data);
            return group ? group_theoretical_weights(data, *groups, tail, v)
                         : lasso_theoretical_weights(data, tail, v);
        }
        case WeightMethod::plugin_lasso:
        case WeightMethod::plugin_logit: {
            CvControl cv;
            cv.seed = mix_seed(spec.seed, 0xE571u + static_cast<std::uint64_t>(replicate));
            cv.fit = spec.fit;
            const VarianceEstimate est = estimate_variances(
                data,
                method == WeightMethod::plugin_lasso ? VarianceMethod::plugin_lasso
                                                     : VarianceMethod::lasso_then_logit,
                cv);
            return group ? group_theoretical_weights(data, *groups, tail, est.variances)
                         : lasso_theoretical_weights(data, tail, est.variances);
        }
    }
    throw std::logic_error("unknown weight method");
}

} // namespace

MonteCarloReport run_monte_carlo(const SimSpec& spec,
                                 const std::vector<WeightMethod>& methods) {
    if (methods.empty()) throw std::invalid_argument("monte carlo: no methods");
    if (spec.replicates < 1) throw std::invalid_argument("monte carlo: replicates < 1");
    const bool group_mode = spec.mode == SimMode::group;
    std::optional<GroupStructure> groups;
    if (group_mode) groups = spec.make_groups();
    const GroupStructure* gptr = group_mode ? &groups.value() : nullptr;
    const Vector beta0 = spec.beta0();

    MonteCarloReport report;
    std::vector<MonteCarloAggregate> agg(
        methods.size() * static_cast<std::size_t>(spec.grid.count));
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        for (int gi = 0; gi < spec.grid.count; ++gi) {
            MonteCarloAggregate& a = agg[mi * static_cast<std::size_t>(spec.grid.count) +
                                         static_cast<std::size_t>(gi)];
            a.method = method_label(spec.mode, methods[mi]);
            a.r_index = gi;
        }
    }

    for (int rep = 0; rep < spec.replicates; ++rep) {
        const Dataset data = generate_linear_logistic(spec, rep);
        const Vector stats = event_statistics(data, gptr);
        const double risk_truth = population_risk_at_truth(data);
        const double beta0_norm =
            group_mode ? group_norm_21(beta0, *groups) : norm1(beta0);

        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const WeightMethod method = methods[mi];
            const std::string label = method_label(spec.mode, method);
            const PenaltyWeights w = weights_for_method(spec, data, gptr, method, rep);
            const double rmax = r_max(data, w, gptr);
            const Vector grid = path_grid(rmax, spec.grid);
            const std::vector<FitResult> path =
                regularization_path_on_grid(data, w, gptr, grid, spec.fit);
            const double wmax = w.max();

            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                const FitResult& fit = path[gi];
                MonteCarloRow row;
                row.method = label;
                row.r_index = static_cast<int>(gi);
                row.r = grid[gi];
                row.replicate = rep;
                row.converged = fit.converged;
                row.event = event_holds(stats, grid[gi], w);
                row.metrics = compute_metrics(fit, beta0, data, gptr);
                row.excess_risk = population_risk(fit.beta, data) - risk_truth;
                row.slow_bound = 2.0 * grid[gi] * beta0_norm * wmax;
                row.violation = row.event && row.converged &&
                                row.excess_risk > row.slow_bound + 1e-6;
                ++report.total_fits;
                if (!fit.converged) ++report.nonconverged_fits;
                if (row.violation) ++report.violation_count;

                MonteCarloAggregate& a =
                    agg[mi * static_cast<std::size_t>(spec.grid.count) + gi];
                ++a.replicates;
                a.r_mean += row.r;
                a.converged_rate += row.converged ? 1.0 : 0.0;
                a.event_rate += row.event ? 1.0 : 0.0;
                a.estimation_error_mean += row.metrics.estimation_error;
                a.prediction_error_mean += row.metrics.prediction_error;
                a.true_selection_rate += row.metrics.true_selection ? 1.0 : 0.0;
                a.false_rate_mean += row.metrics.false_rate;
                a.excess_risk_mean += row.excess_risk;
                a.slow_bound_mean += row.slow_bound;
                a.violation_count += row.violation ? 1 : 0;

                report.rows.push_back(std::move(row));
            }
        }
    }

    for (MonteCarloAggregate& a : agg) {
        if (a.replicates > 0) {
            const double inv = 1.0 / static_cast<double>(a.replicates);
            a.r_mean *= inv;
            a.converged_rate *= inv;
            a.event_rate *= inv;
            a.estimation_error_mean *= inv;
            a.prediction_error_mean *= inv;
            a.true_selection_rate *= inv;
            a.false_rate_mean *= inv;
            a.excess_risk_mean *= inv;
            a.slow_bound_mean *= inv;
        }
    }
    report.aggregates = std::move(agg);

    if (report.nonconverged_fits * 100 > report.total_fits)
        throw std::runtime_error("monte carlo: " +
                                 std::to_string(report.nonconverged_fits) + " of " +
                                 std::to_string(report.total_fits) +
                                 " fits failed to converge (> 1%)");
    return report;
}

OracleCheckReport oracle_check(const OracleCheckSpec& spec) {
    const SimSpec& sim = spec.sim;
    const bool group_mode = sim.mode == SimMode::group;
    std::optional<GroupStructure> groups;
    if (group_mode) groups = sim.make_groups();
    const GroupStructure* gptr = group_mode ? &groups.value() : nullptr;
    const Vector beta0 = sim.beta0();
    const std::size_t s =
        group_mode ? group_support(beta0, *groups).size() : support(beta0).size();

    OracleCheckReport report;
    for (int rep = 0; rep < sim.replicates; ++rep) {
        const Dataset data = generate_linear_logistic(sim, rep);
        const TailParams tail{sim.x, 0.0};
        const PenaltyWeights w = group_mode
                                     ? group_bernstein_weights(data, *groups, tail)
                                     : lasso_bernstein_weights(data, tail);
        const FitResult fit =
            group_mode ? fit_group_lasso(data, *groups, w, spec.r, sim.fit)
                       : fit_lasso(data, w, spec.r, sim.fit);

        OracleCheckRow row;
        row.replicate = rep;
        row.converged = fit.converged;
        row.kkt = fit.kkt_residual;
        row.event = event_A_holds(data, spec.r, w, gptr);
        row.excess_risk = population_risk(fit.beta, data) - population_risk_at_truth(data);
        row.slow_bound = slow_rate_bound(beta0, spec.r, w, 0.0, gptr);
        row.slow_violation =
            row.event && row.converged && row.excess_risk > row.slow_bound + 1e-6;

        if (spec.re_bounds && s > 0) {
            const Vector fhat = matvec(data.X, fit.beta);
            row.obs_norm_sq = empirical_norm_sq(fhat, *data.f0);
            Vector delta(data.p());
            for (std::size_t j = 0; j < data.p(); ++j) delta[j] = fit.beta[j] - beta0[j];
            row.obs_est = group_mode ? group_norm_21(delta, *groups) : norm1(delta);
            row.obs_lq = 0.0;
            if (group_mode) {
                for (std::size_t l = 0; l < groups->num_groups(); ++l)
                    row.obs_lq += std::pow(group_norm(delta, groups->group(l)), spec.q);
            } else {
                for (double v : delta) row.obs_lq += std::pow(std::fabs(v), spec.q);
            }

            const double C0 =
                spec.C0.value_or(std::max(norm_inf(fhat), norm_inf(*data.f0)));
            const OracleConstants consts = compute_constants(data, C0, spec.eta);

            const ReKind cone = group_mode ? ReKind::group : ReKind::lasso;
            ReQuery q3{static_cast<int>(s), 3.0, cone, std::nullopt, std::nullopt};
            ReQuery qe{static_cast<int>(s), 3.0 + 4.0 / spec.eta, cone, std::nullopt,
                       std::nullopt};
            if (group_mode) {
                q3.groups = *groups;
                qe.groups = *groups;
            }
            const ReEstimate mu3 = re_constant(data.X, q3, spec.re_budget);
            const ReEstimate mue = re_constant(data.X, qe, spec.re_budget);
            row.mu = mu3.value;
            row.mu_eta = mue.value;

            const BoundReport col =
                linear_case_bounds(beta0, spec.r, w, mu3, consts, gptr, spec.q);
            row.col_excess_bound = col.get("excess_risk_bound");
            row.col_norm_bound = col.get("empirical_norm_sq_bound");
            row.col_est_bound = col.get(group_mode ? "l21_bound" : "l1_bound");
            row.col_lq_bound = col.get("lq_bound");

            if (mue.value > 0.0) {
                row.fast_excess_bound = fast_rate_oracle_rhs(
                    0.0,
                    fast_rate_bound(static_cast<int>(s), spec.r, w, mue.value, consts,
                                    BoundTarget::excess_risk),
                    consts, BoundTarget::excess_risk);
                row.fast_norm_bound = fast_rate_oracle_rhs(
                    0.0,
                    fast_rate_bound(static_cast<int>(s), spec.r, w, mue.value, consts,
                                    BoundTarget::empirical_norm),
                    consts, BoundTarget::empirical_norm);
            }

            const bool audit = row.event && row.converged;
            row.col_violation = audit && (row.excess_risk > row.col_excess_bound + 1e-6 ||
                                          row.obs_norm_sq > row.col_norm_bound + 1e-6 ||
                                          row.obs_est > row.col_est_bound + 1e-6 ||
                                          row.obs_lq > row.col_lq_bound + 1e-6);
            row.fast_violation =
                audit && (row.excess_risk > row.fast_excess_bound + 1e-6 ||
                          row.obs_norm_sq > row.fast_norm_bound + 1e-6);

            if (group_mode) {
                Vector variances(data.n());
                for (std::size_t i = 0; i < data.n(); ++i) {
                    const double pi = sigmoid((*data.f0)[i]);
                    variances[i] = std::clamp(pi * (1.0 - pi), 0.0, 0.25);
                }
                ReQuery q2{static_cast<int>(s), 3.0 * w.max() / w.min(),
                           ReKind::weighted_group, *groups, variances};
                const ReEstimate mu2 = re_constant(data.X, q2, spec.re_budget);
                row.mu2_raw = mu2.value;
                const BoundReport unb = unbounded_case_bounds(beta0, spec.r, w, mu2,
                                                              data, *groups, spec.q);
                row.side_condition = unb.get_flag("side_condition");
                row.theo_excess_bound = unb.get("excess_risk_bound");
                row.theo_est_bound = unb.get("l21_bound");
                row.theo_lq_bound = unb.get("lq_bound");
                row.theo_pred_bound = unb.get_flag("prediction_bound_available")
                                          ? unb.get("prediction_bound")
                                          : std::numeric_limits<double>::infinity();
                row.theo_violation =
                    audit && row.side_condition &&
                    (row.excess_risk > row.theo_excess_bound + 1e-6 ||
                     row.obs_est > row.theo_est_bound + 1e-6 ||
                     row.obs_lq > row.theo_lq_bound + 1e-6 ||
                     row.obs_norm_sq > row.theo_pred_bound + 1e-6);
                if (row.side_condition) ++report.side_condition_count;
            }
        }

        report.events += row.event ? 1 : 0;
        report.converged += row.converged ? 1 : 0;
        report.slow_violations += row.slow_violation ? 1 : 0;
        report.col_violations += row.col_violation ? 1 : 0;
        report.fast_violations += row.fast_violation ? 1 : 0;
        report.theo_violations += row.theo_violation ? 1 : 0;
        report.rows.push_back(row);
    }
    return report;
}

TailAuditReport tail_bound_audit(const TailAuditSpec& spec) {
    if (spec.trials < 1000) throw std::invalid_argument("tail audit: trials must be >= 1000");
    if (spec.n < 1) throw std::invalid_argument("tail audit: n must be >= 1");
    if (spec.x <= 0.0) throw std::invalid_argument("tail audit: x must be positive");

    double mean, second_moment, upper, range;
    switch (spec.dist) {
        case TailAuditSpec::Dist::rademacher:
            mean = 0.0;
            second_moment = 1.0;
            upper = 1.0;
            range = 2.0;
            break;
        case TailAuditSpec::Dist::uniform:
            if (spec.hi <= spec.lo)
                throw std::invalid_argument("tail audit: bad uniform support");
            mean = 0.5 * (spec.lo + spec.hi);
            second_moment =
                (spec.lo * spec.lo + spec.lo * spec.hi + spec.hi * spec.hi) / 3.0;
            upper = spec.hi;
            range = spec.hi - spec.lo;
            break;
        case TailAuditSpec::Dist::bernoulli:
            if (spec.prob < 0.0 || spec.prob > 1.0)
                throw std::invalid_argument("tail audit: bad bernoulli parameter");
            mean = spec.prob;
            second_moment = spec.prob;
            upper = 1.0;
            range = 1.0;
            break;
        case TailAuditSpec::Dist::constant:
            mean = spec.value;
            second_moment = spec.value * spec.value;
            upper = spec.value;
            range = 0.0;
            break;
        default:
            throw std::invalid_argument("tail audit: unknown distribution");
    }

    const double nd = static_cast<double>(spec.n);
    TailAuditReport rep;
    rep.trials = spec.trials;
    rep.bound = 2.0 * std::exp(-spec.x);
    if (spec.kind == TailAuditSpec::Kind::bernstein) {
        const double v = nd * second_moment;
        rep.threshold = std::sqrt(2.0 * v * spec.x) + upper * spec.x / 3.0;
    } else {
        rep.threshold = range * std::sqrt(nd * spec.x / 2.0);
    }

    auto rng = make_rng(spec.seed, 0x7A11u);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    std::uniform_real_distribution<double> unif_ab(spec.lo, spec.hi);
    int exceed = 0;
    for (int t = 0; t < spec.trials; ++t) {
        double s = 0.0;
        for (int i = 0; i < spec.n; ++i) {
            switch (spec.dist) {
                case TailAuditSpec::Dist::rademacher:
                    s += unif01(rng) < 0.5 ? -1.0 : 1.0;
                    break;
                case TailAuditSpec::Dist::uniform: s += unif_ab(rng); break;
                case TailAuditSpec::Dist::bernoulli:
                    s += unif01(rng) < spec.prob ? 1.0 : 0.0;
                    break;
                case TailAuditSpec::Dist::constant: s += spec.value; break;
            }
        }
        if (std::fabs(s - nd * mean) > rep.threshold) ++exceed;
    }
    rep.frequency = static_cast<double>(exceed) / static_cast<double>(spec.trials);
    const double pb = std::min(rep.bound, 1.0);
    rep.slack =
        3.0 * std::sqrt(std::max(pb * (1.0 - pb), 1e-12) / static_cast<double>(spec.trials));
    rep.within = rep.frequency <= rep.bound + rep.slack;
    return rep;
}

} // namespace slogit
