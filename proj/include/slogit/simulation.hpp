#pragma once

#include "slogit/dataset.hpp"
#include "slogit/oracle_bounds.hpp"
#include "slogit/re_condition.hpp"
#include "slogit/solver.hpp"
#include "slogit/weights.hpp"

#include <cstdint>
#include <string>

namespace slogit {

// Cross-validation controls for penalty-level selection.
struct CvControl {
    int grid_count = 25;
    double r_min_ratio = 0.01;
    int folds = 5;
    std::uint64_t seed = 0;
    FitConfig fit;
};

// Stratified K-fold CV minimizing held-out deviance; ties break toward the
// larger (sparser) r. `grid` must be decreasing (a path grid).
// mean_deviance_out, when given, receives the per-grid-point CV criterion.
double cross_validate_r(const Dataset& data, const PenaltyWeights& weights,
                        const GroupStructure* groups, std::span<const double> grid,
                        int folds, std::uint64_t seed, const FitConfig& cfg = {},
                        Vector* mean_deviance_out = nullptr);

enum class SimMode { lasso, group };

// Data-generating setup: i.i.d. standard Gaussian design, linear truth,
// Bernoulli responses. Lasso truth (1.5, -1, 2, 0, ..., 0); group truth
// blocks of 1, -1.5, 2 on the first three groups.
struct SimSpec {
    SimMode mode = SimMode::lasso;
    std::size_t n = 200;
    std::size_t p = 203;               // lasso mode
    std::size_t num_groups = 8;        // group mode: g
    std::size_t relevant_group_size = 5;   // nk  (groups 1..3)
    std::size_t irrelevant_group_size = 20; // nkc (groups 4..g)
    double x = 2.0;
    PathSpec grid{100, 0.01};
    int replicates = 100;
    std::uint64_t seed = 0;
    FitConfig fit;

    std::size_t dimension() const;
    Vector beta0() const;
    GroupStructure make_groups() const; // group mode only
};

Dataset generate_linear_logistic(const SimSpec& spec, int replicate);

// Per-unit concentration statistics: Z_l = (1/n) sqrt(sum_{j in G_l}
// (sum_i X_ij eps_i)^2) in group mode, |S_j|/n in lasso mode, where
// eps_i = y_i - pi(f0_i). The event holds iff Z_u <= r w_u / 2 for all u.
Vector event_statistics(const Dataset& data, const GroupStructure* groups);
bool event_holds(std::span<const double> stats, double r, const PenaltyWeights& weights);
bool event_A_holds(const Dataset& data, double r, const PenaltyWeights& weights,
                   const GroupStructure* groups);

struct Metrics {
    double estimation_error = 0.0; // ||beta_hat - beta0||_2
    double prediction_error = 0.0; // ||X beta_hat - X beta0||_n^2
    bool true_selection = false;   // exact support recovery (unit level per mode)
    double false_rate = 0.0;       // misclassified units / total units
};

Metrics compute_metrics(const FitResult& fit, std::span<const double> beta0,
                        const Dataset& data, const GroupStructure* groups);

enum class WeightMethod {
    unweighted,   // w_j = 1 (lasso) or w_l = sqrt(|G_l|) (group)
    bernstein,    // data-driven tail weights
    theoretical,  // variance-dependent weights with the true variances
    plugin_lasso, // theoretical weights, variances from a CV'd lasso
    plugin_logit  // theoretical weights, variances from lasso + logistic refit
};

std::string method_label(SimMode mode, WeightMethod method);

struct MonteCarloRow {
    std::string method;
    int r_index = 0;
    double r = 0.0;
    int replicate = 0;
    bool converged = false;
    bool event = false;
    Metrics metrics;
    double excess_risk = 0.0;
    double slow_bound = 0.0; // slow-rate oracle RHS at beta0
    bool violation = false;  // event && converged && excess > slow_bound + 1e-6
};

struct MonteCarloAggregate {
    std::string method;
    int r_index = 0;
    double r_mean = 0.0;
    int replicates = 0;
    double converged_rate = 0.0;
    double event_rate = 0.0;
    double estimation_error_mean = 0.0;
    double prediction_error_mean = 0.0;
    double true_selection_rate = 0.0;
    double false_rate_mean = 0.0;
    double excess_risk_mean = 0.0;
    double slow_bound_mean = 0.0;
    int violation_count = 0;
};

struct MonteCarloReport {
    std::vector<MonteCarloRow> rows;
    std::vector<MonteCarloAggregate> aggregates;
    int total_fits = 0;
    int nonconverged_fits = 0;
    int violation_count = 0;
};

// Runs the full protocol: per replicate and method, a warm-started path of
// spec.grid.count fits, per-point metrics, concentration-event flags, and the
// conditional slow-rate audit. Throws if more than 1% of fits fail to
// converge.
MonteCarloReport run_monte_carlo(const SimSpec& spec,
                                 const std::vector<WeightMethod>& methods);

// Per-replicate oracle-inequality audit: Bernstein-weighted fit at a fixed r,
// concentration-event flag, slow-rate check at beta0, and (optionally) the
// restricted-eigenvalue-based fast-rate / corollary / unbounded-case bounds
// with one-sided containment checks. Conditional on the event and a
// KKT-certified fit the inequalities are deterministic consequences, so
// violation counts are expected to be zero.
struct OracleCheckSpec {
    SimSpec sim;              // grid is ignored; a single fit at r per replicate
    double r = 1.0;
    double eta = 1.0;
    double q = 2.0;
    std::optional<double> C0; // default: max(||X beta_hat||_inf, ||f0||_inf)
    bool re_bounds = false;   // compute mu/mu1/mu2 bounds (full enumeration)
    ReBudget re_budget;
};

struct OracleCheckRow {
    int replicate = 0;
    bool event = false;
    bool converged = false;
    double kkt = 0.0;
    double excess_risk = 0.0;
    double slow_bound = 0.0;
    bool slow_violation = false;

    // Filled when re_bounds is set.
    double mu = 0.0;       // RE constant at (s, 3)
    double mu_eta = 0.0;   // RE constant at (s, 3+4/eta)
    double mu2_raw = 0.0;  // weighted-Gram ratio
    double obs_norm_sq = 0.0; // ||X beta_hat - X beta0||_n^2
    double obs_est = 0.0;     // l1 or l2,1 estimation error
    double obs_lq = 0.0;      // sum of q-th powers of the unit errors
    double col_excess_bound = 0.0;
    double col_norm_bound = 0.0;
    double col_est_bound = 0.0;
    double col_lq_bound = 0.0;
    double fast_excess_bound = 0.0;
    double fast_norm_bound = 0.0;
    bool side_condition = false;
    double theo_excess_bound = 0.0;
    double theo_est_bound = 0.0;
    double theo_lq_bound = 0.0;
    double theo_pred_bound = 0.0;
    bool col_violation = false;
    bool fast_violation = false;
    bool theo_violation = false;
};

struct OracleCheckReport {
    std::vector<OracleCheckRow> rows;
    int events = 0;
    int converged = 0;
    int slow_violations = 0;
    int col_violations = 0;
    int fast_violations = 0;
    int theo_violations = 0;
    int side_condition_count = 0;
};

OracleCheckReport oracle_check(const OracleCheckSpec& spec);

// Empirical check of the concentration lemmas the penalty weights rest on.
struct TailAuditSpec {
    enum class Kind { bernstein, hoeffding } kind = Kind::bernstein;
    enum class Dist { rademacher, uniform, bernoulli, constant } dist = Dist::rademacher;
    int n = 50;        // summands per trial
    double lo = -1.0;  // uniform support [lo, hi]
    double hi = 1.0;
    double prob = 0.5; // bernoulli parameter
    double value = 1.0; // constant value
    double x = 2.0;
    int trials = 10000;
    std::uint64_t seed = 0;
};

struct TailAuditReport {
    double threshold = 0.0;
    double bound = 0.0;     // lemma tail probability at x
    double frequency = 0.0; // empirical exceedance frequency
    double slack = 0.0;     // 3 Monte-Carlo standard errors
    int trials = 0;
    bool within = false;    // frequency <= bound + slack
};

TailAuditReport tail_bound_audit(const TailAuditSpec& spec);

} // namespace slogit
