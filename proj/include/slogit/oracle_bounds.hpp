#pragma once

#include "slogit/dataset.hpp"
#include "slogit/re_condition.hpp"
#include "slogit/weights.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace slogit {

// Constants feeding every explicit bound. With M = C0 + c1 (the worst-case
// sup-norm of f_beta - f0 under the envelope assumptions):
//   c0  = (exp(-M)+M-1)/M^2,   c0' = (exp(M)-M-1)/M^2,
//   eps0 = min_i pi(f0_i)(1-pi(f0_i)),   c_eta = 2(1+2/eta)^2/(2+2/eta).
struct OracleConstants {
    double C0 = 0.0;
    double c1 = 0.0;
    double eps0 = 0.0;
    double c0 = 0.0;
    double c0_prime = 0.0;
    double eta = 1.0;
    double c_eta = 0.0;
    double M() const noexcept { return C0 + c1; }
};

double c_eta_of(double eta);

// c1 and eps0 come from f0; C0 is the caller's envelope on the fitted class.
// Throws when f0 is absent or eps0 underflows to zero (degenerate labels).
OracleConstants compute_constants(const Dataset& data, double C0, double eta);

enum class BoundTarget { excess_risk, empirical_norm };

// Slow-rate RHS: risk_gap + 2 r ||beta_ref|| max(w), with the l1 norm in
// coefficient mode and the l2,1 norm in group mode (groups required there).
double slow_rate_bound(std::span<const double> beta_ref, double r,
                       const PenaltyWeights& weights, double risk_gap,
                       const GroupStructure* groups = nullptr);

// The variance summand of the fast-rate displays:
//   excess_risk:    c_eta s r^2 max(w)^2 / (c0 eps0 mu^2)
//   empirical_norm: the same times 4 / (c0' eps0)
double fast_rate_bound(int sparsity, double r, const PenaltyWeights& weights, double mu,
                       const OracleConstants& consts, BoundTarget target);

// Composes approximation + variance terms into the full oracle RHS:
// (1+eta)(a+v), with the extra prefactor c0'/(4 c0 eps0) for the norm target.
double fast_rate_oracle_rhs(double approx_term, double variance_term,
                            const OracleConstants& consts, BoundTarget target);

// Flat, insertion-ordered record of named bounds and applicability flags.
struct BoundReport {
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::pair<std::string, bool>> flags;

    void put(std::string key, double v) { values.emplace_back(std::move(key), v); }
    void put_flag(std::string key, bool v) { flags.emplace_back(std::move(key), v); }
    double get(const std::string& key) const;
    bool get_flag(const std::string& key) const;
};

// The four linear-truth corollary displays (excess risk, squared empirical
// norm, l1/l2,1 estimation error, and its q-th power), evaluated verbatim.
// mu is the restricted-eigenvalue estimate at (s, 3); s = |K(beta0)| or
// |J(beta0)|. q in (1,2].
BoundReport linear_case_bounds(std::span<const double> beta0, double r,
                               const PenaltyWeights& weights, const ReEstimate& mu,
                               const OracleConstants& consts,
                               const GroupStructure* groups, double q = 2.0);

// Unbounded-functions bounds. Computes v = max_i max_l ||z_i^l||_2 and
// a0 = 3 max(w)/min(w), checks the side condition
//   r (1+a0)^2 max(w) <= mu2^2 / (3 v |J|),
// and reports the three estimation bounds plus (when eps0 is available) the
// prediction bound. Wherever the displays write mu2^2, the square of the raw
// ratio returned by re_constant is used; the report carries the raw value too.
BoundReport unbounded_case_bounds(std::span<const double> beta0, double r,
                                  const PenaltyWeights& weights, const ReEstimate& mu2,
                                  const Dataset& data, const GroupStructure& groups,
                                  double q = 2.0,
                                  std::optional<double> eps0 = std::nullopt);

// b1^q for q in (1,2]: if sum a_j <= b1 with a_j >= 0 then sum a_j^q <= b1^q.
double lq_power_bound(double b1, double q);

// Effective per-coefficient weight of the Hoeffding-calibrated variant
// (unit solver weights, r = A sqrt(log p / n)): A sqrt(log p / n).
double hoeffding_effective_weight(double A, std::size_t n, std::size_t p);

} // namespace slogit
