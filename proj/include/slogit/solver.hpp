#pragma once

#include "slogit/dataset.hpp"
#include "slogit/weights.hpp"

#include <optional>

namespace slogit {

// Proximal block coordinate descent driven by a quadratic majorant of the
// logistic loss. Backtracking acts on the majorant curvature: an outer step
// is accepted only if the model upper-bounds the realized loss, otherwise the
// curvature is grown by 1/step_shrink (capped at the certified 1/4 bound).
struct FitConfig {
    double tol = 1e-7;      // KKT residual target
    int max_iter = 10000;   // outer iterations (gradient refreshes)
    int inner_sweeps = 5;   // majorant CD sweeps per outer iteration
    double initial_step = 1.0;        // initial curvature = 0.25/initial_step
    double step_shrink = 0.5;         // step multiplier on rejection
    double sufficient_decrease = 1.0; // scales the majorant acceptance test
    bool use_intercept = false;       // unpenalized intercept, off by default
    std::vector<double>* objective_trace = nullptr; // per-iteration objectives
};

struct FitResult {
    Vector beta;
    double intercept = 0.0;
    double r = 0.0;
    double objective = 0.0;    // empirical risk + penalty, recomputed at exit
    double kkt_residual = 0.0; // from an exact gradient at the returned point
    int iterations = 0;
    bool converged = false;
    std::vector<int> active; // nonzero coefficients (lasso) or groups (group mode)
};

// sign(u) * max(|u|-t, 0)
double soft_threshold(double u, double t) noexcept;
// 0 if ||v|| <= t, else (1 - t/||v||) v. Ties at ||v|| = t map to zero.
void group_soft_threshold(std::span<double> v, double t) noexcept;

FitResult fit_lasso(const Dataset& data, const PenaltyWeights& weights, double r,
                    const FitConfig& cfg = {}, const Vector* warm_start = nullptr);

FitResult fit_group_lasso(const Dataset& data, const GroupStructure& groups,
                          const PenaltyWeights& weights, double r,
                          const FitConfig& cfg = {}, const Vector* warm_start = nullptr);

// Maximal KKT violation of the subgradient optimality conditions at beta;
// zero iff beta is an exact minimizer. groups == nullptr means lasso mode.
double kkt_residual(std::span<const double> beta, const Dataset& data,
                    const GroupStructure* groups, const PenaltyWeights& weights,
                    double r);

// Smallest r with an all-zero solution: max_u ||grad_u R_hat(0)|| / w_u.
double r_max(const Dataset& data, const PenaltyWeights& weights,
             const GroupStructure* groups);

struct PathSpec {
    int count = 100;
    double r_min_ratio = 0.01;
};

// Log-spaced grid from r_max down to r_min_ratio*r_max, in decreasing order.
Vector path_grid(double rmax, const PathSpec& spec);

// Warm-started fits along path_grid(r_max(...)). Non-convergence at a point
// is flagged in its FitResult; the path continues.
std::vector<FitResult> regularization_path(const Dataset& data,
                                           const PenaltyWeights& weights,
                                           const GroupStructure* groups,
                                           const PathSpec& spec,
                                           const FitConfig& cfg = {});

// Same, but on a caller-supplied decreasing grid.
std::vector<FitResult> regularization_path_on_grid(const Dataset& data,
                                                   const PenaltyWeights& weights,
                                                   const GroupStructure* groups,
                                                   std::span<const double> grid,
                                                   const FitConfig& cfg = {});

} // namespace slogit
