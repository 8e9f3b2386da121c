#include "slogit/oracle_bounds.hpp"

#include "slogit/model.hpp"

#include <cmath>
#include <stdexcept>

namespace slogit {

double c_eta_of(double eta) {
    if (eta <= 0.0) throw std::invalid_argument("bounds: eta must be positive");
    const double t = 1.0 + 2.0 / eta;
    return 2.0 * t * t / (2.0 + 2.0 / eta);
}

OracleConstants compute_constants(const Dataset& data, double C0, double eta) {
    if (!data.has_f0()) throw std::invalid_argument("bounds: f0 required");
    if (C0 < 0.0) throw std::invalid_argument("bounds: C0 must be nonnegative");
    OracleConstants k;
    k.C0 = C0;
    k.eta = eta;
    k.c_eta = c_eta_of(eta);
    k.c1 = norm_inf(*data.f0);
    double eps0 = 0.25;
    for (double f : *data.f0) {
        const double pi = sigmoid(f);
        eps0 = std::min(eps0, pi * (1.0 - pi));
    }
    if (eps0 <= 0.0)
        throw std::domain_error("bounds: eps0 = 0 (deterministic labels), bounds undefined");
    k.eps0 = eps0;
    const double M = k.M();
    k.c0 = concordance_lower_factor(M);
    k.c0_prime = concordance_upper_factor(M);
    return k;
}

double slow_rate_bound(std::span<const double> beta_ref, double r,
                       const PenaltyWeights& weights, double risk_gap,
                       const GroupStructure* groups) {
    if (risk_gap < -1e-10)
        throw std::invalid_argument("slow_rate_bound: negative risk gap");
    double norm;
    if (weights.mode == WeightMode::group) {
        if (groups == nullptr)
            throw std::invalid_argument("slow_rate_bound: group mode requires groups");
        norm = group_norm_21(beta_ref, *groups);
    } else {
        norm = norm1(beta_ref);
    }
    return risk_gap + 2.0 * r * norm * weights.max();
}

double fast_rate_bound(int sparsity, double r, const PenaltyWeights& weights, double mu,
                       const OracleConstants& consts, BoundTarget target) {
    if (sparsity < 0) throw std::invalid_argument("fast_rate_bound: negative sparsity");
    if (sparsity == 0) return 0.0;
    if (mu <= 0.0) throw std::invalid_argument("fast_rate_bound: mu must be positive");
    const double W = weights.max();
    double v = consts.c_eta * static_cast<double>(sparsity) * r * r * W * W /
               (consts.c0 * consts.eps0 * mu * mu);
    if (target == BoundTarget::empirical_norm)
        v *= 4.0 / (consts.c0_prime * consts.eps0);
    return v;
}

double fast_rate_oracle_rhs(double approx_term, double variance_term,
                            const OracleConstants& consts, BoundTarget target) {
    double rhs = (1.0 + consts.eta) * (approx_term + variance_term);
    if (target == BoundTarget::empirical_norm)
        rhs *= consts.c0_prime / (4.0 * consts.c0 * consts.eps0);
    return rhs;
}

double BoundReport::get(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    throw std::out_of_range("BoundReport: no value named " + key);
}

bool BoundReport::get_flag(const std::string& key) const {
    for (const auto& [k, v] : flags)
        if (k == key) return v;
    throw std::out_of_range("BoundReport: no flag named " + key);
}

namespace {

void check_q(double q) {
    if (!(q > 1.0) || q > 2.0)
        throw std::invalid_argument("bounds: q must lie in (1, 2]");
}

} // namespace

double lq_power_bound(double b1, double q) {
    check_q(q);
    if (b1 < 0.0) throw std::invalid_argument("lq_power_bound: b1 must be nonnegative");
    return std::pow(b1, q);
}

BoundReport linear_case_bounds(std::span<const double> beta0, double r,
                               const PenaltyWeights& weights, const ReEstimate& mu,
                               const OracleConstants& consts,
                               const GroupStructure* groups, double q) {
    check_q(q);
    const bool group_mode = weights.mode == WeightMode::group;
    if (group_mode && groups == nullptr)
        throw std::invalid_argument("linear_case_bounds: group mode requires groups");

    const std::size_t s =
        group_mode ? group_support(beta0, *groups).size() : support(beta0).size();

    BoundReport rep;
    rep.put("s", static_cast<double>(s));
    rep.put("r", r);
    rep.put("max_weight", weights.max());
    rep.put("min_weight", weights.min());
    rep.put("mu", mu.value);
    rep.put("q", q);
    rep.put_flag("mu_certified_upper", mu.certified_upper);
    // An upper-bound witness for mu makes every bound below optimistic
    // (smaller than the theorem's right-hand side).
    rep.put_flag("optimistic", mu.certified_upper);

    const std::string est_key = group_mode ? "l21_bound" : "l1_bound";
    if (s == 0) {
        rep.put("excess_risk_bound", 0.0);
        rep.put("empirical_norm_sq_bound", 0.0);
        rep.put(est_key, 0.0);
        rep.put("lq_bound", 0.0);
        return rep;
    }
    if (mu.value <= 0.0)
        throw std::invalid_argument("linear_case_bounds: mu must be positive");

    const double W = weights.max();
    const double wmin = weights.min();
    const double mu2 = mu.value * mu.value;
    const double sd = static_cast<double>(s);
    const double c0e = consts.c0 * consts.eps0;

    const double excess = 9.0 * sd * r * r * W * W / (mu2 * c0e);
    // The lasso display carries s^2 in the norm bound where the group display
    // carries s; both are reproduced verbatim.
    const double norm_sq = group_mode
                               ? 9.0 * sd * r * r * W * W / (mu2 * c0e * c0e)
                               : 9.0 * sd * sd * r * r * W * W / (mu2 * c0e * c0e);
    const double est = 12.0 * sd * r * W * W / (mu2 * c0e * wmin);
    rep.put("excess_risk_bound", excess);
    rep.put("empirical_norm_sq_bound", norm_sq);
    rep.put(est_key, est);
    rep.put("lq_bound", lq_power_bound(est, q));
    return rep;
}

BoundReport unbounded_case_bounds(std::span<const double> beta0, double r,
                                  const PenaltyWeights& weights, const ReEstimate& mu2,
                                  const Dataset& data, const GroupStructure& groups,
                                  double q, std::optional<double> eps0) {
    check_q(q);
    if (weights.mode != WeightMode::group)
        throw std::invalid_argument("unbounded_case_bounds: group weights required");
    if (groups.dimension() != data.p())
        throw std::invalid_argument("unbounded_case_bounds: groups do not match p");
    if (beta0.size() != data.p())
        throw std::invalid_argument("unbounded_case_bounds: beta0 dimension mismatch");

    const std::size_t s = group_support(beta0, groups).size();
    const double W = weights.max();
    const double wmin = weights.min();
    const double a0 = 3.0 * W / wmin;

    // v = max_i max_l || z_i^l ||_2 (rows restricted to each group)
    double v = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t l = 0; l < groups.num_groups(); ++l) {
            double ss = 0.0;
            for (int j : groups.group(l)) {
                const double z = data.X(i, static_cast<std::size_t>(j));
                ss += z * z;
            }
            v = std::max(v, std::sqrt(ss));
        }
    }

    if (!eps0.has_value() && data.has_f0()) {
        double e = 0.25;
        for (double f : *data.f0) {
            const double pi = sigmoid(f);
            e = std::min(e, pi * (1.0 - pi));
        }
        if (e > 0.0) eps0 = e;
    }

    // Wherever the displays write mu2^2(s,3), the square of the raw ratio is
    // substituted; the raw value is reported alongside.
    const double mu2sq = mu2.value * mu2.value;

    BoundReport rep;
    rep.put("s", static_cast<double>(s));
    rep.put("r", r);
    rep.put("max_weight", W);
    rep.put("min_weight", wmin);
    rep.put("a0", a0);
    rep.put("v", v);
    rep.put("mu2_raw", mu2.value);
    rep.put("mu2_squared", mu2sq);
    rep.put_flag("mu_certified_upper", mu2.certified_upper);
    rep.put_flag("optimistic", mu2.certified_upper);

    const double sd = static_cast<double>(s);
    const double onea0 = (1.0 + a0) * (1.0 + a0);

    bool side_ok;
    if (s == 0) {
        side_ok = true;
        rep.put("side_condition_lhs", r * onea0 * W);
        rep.put("side_condition_rhs", std::numeric_limits<double>::infinity());
        rep.put("excess_risk_bound", 0.0);
        rep.put("l21_bound", 0.0);
        rep.put("lq_bound", 0.0);
        rep.put_flag("side_condition", side_ok);
        if (eps0.has_value() && *eps0 > 0.0) {
            rep.put("eps0", *eps0);
            rep.put("prediction_bound", 0.0);
            rep.put_flag("prediction_bound_available", true);
        } else {
            rep.put_flag("prediction_bound_available", false);
        }
        return rep;
    }

    const double lhs = r * onea0 * W;
    const double rhs = mu2sq > 0.0 ? mu2sq / (3.0 * v * sd)
                                   : 0.0;
    side_ok = mu2sq > 0.0 && lhs <= rhs;
    rep.put("side_condition_lhs", lhs);
    rep.put("side_condition_rhs", rhs);
    rep.put_flag("side_condition", side_ok);

    const double inf = std::numeric_limits<double>::infinity();
    const double excess =
        mu2sq > 0.0 ? 9.0 * onea0 * sd * r * r * W * W / mu2sq : inf;
    const double l21 = mu2sq > 0.0 ? 6.0 * onea0 * sd * r * W / mu2sq : inf;
    rep.put("excess_risk_bound", excess);
    rep.put("l21_bound", l21);
    rep.put("lq_bound", std::isfinite(l21) ? lq_power_bound(l21, q) : inf);
    if (eps0.has_value() && *eps0 > 0.0) {
        rep.put("eps0", *eps0);
        rep.put("prediction_bound",
                mu2sq > 0.0 ? 36.0 * onea0 * sd * r * r * W * W / (mu2sq * *eps0) : inf);
        rep.put_flag("prediction_bound_available", true);
    } else {
        rep.put_flag("prediction_bound_available", false);
    }
    return rep;
}

double hoeffding_effective_weight(double A, std::size_t n, std::size_t p) {
    if (A <= 0.0) throw std::invalid_argument("hoeffding weight: A must be positive");
    if (n == 0 || p == 0) throw std::invalid_argument("hoeffding weight: empty problem");
    return A * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

} // namespace slogit
