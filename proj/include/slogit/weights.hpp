#pragma once

#include "slogit/dataset.hpp"

#include <cstdint>

namespace slogit {

struct CvControl;

enum class WeightMode { coefficient, group };

// Penalty multipliers: one per coefficient (lasso) or per group.
struct PenaltyWeights {
    Vector values;
    WeightMode mode = WeightMode::coefficient;

    double max() const;
    double min() const;
    void validate() const; // all entries strictly positive and finite
};

// Tail probability parameter x and the envelope bound c2 on |X_ij|.
// c2 <= 0 requests the tightest valid envelope max_ij |X_ij|.
struct TailParams {
    double x = 2.0;
    double c2 = 0.0;
};

double resolve_c2(const Dataset& data, const TailParams& tail);

// w_j = (2/n) sqrt( (1/2) sum_i X_ij^2 (x+log p) ) + 2 c2 (x+log p) / (3n)
PenaltyWeights lasso_bernstein_weights(const Dataset& data, const TailParams& tail);

// w_l = (2|G_l|/n) sqrt( (1/2) max_{j in G_l} sum_i X_ij^2 (x+log p) )
//       + 2 c2 |G_l| (x+log p) / (3n)
PenaltyWeights group_bernstein_weights(const Dataset& data, const GroupStructure& groups,
                                       const TailParams& tail);

// Variance-dependent weights,
// w'_l = (2|G_l|/n) sqrt( 2 max_{j in G_l} sum_i X_ij^2 var_i (x+log p) )
//        + (2|G_l| max_i max_{j in G_l} |X_ij| / 3n) (x+log p),
// with var_i = E(eps_i^2) = pi(f0_i)(1-pi(f0_i)) in [0, 1/4].
PenaltyWeights group_theoretical_weights(const Dataset& data, const GroupStructure& groups,
                                         const TailParams& tail,
                                         std::span<const double> variances);

// Singleton-group specialization of the above.
PenaltyWeights lasso_theoretical_weights(const Dataset& data, const TailParams& tail,
                                         std::span<const double> variances);

PenaltyWeights unit_weights(std::size_t count, WeightMode mode);
// Baseline group weights sqrt(|G_l|).
PenaltyWeights sqrt_size_group_weights(const GroupStructure& groups);

enum class VarianceMethod { plugin_lasso, lasso_then_logit };

struct VarianceEstimate {
    Vector variances;      // sigma_hat_i^2, clamped to [1e-6, 0.25]
    double selected_r = 0; // cross-validated penalty level of the stage-1 lasso
    bool fallback_used = false; // lasso_then_logit fell back to plugin values
    std::vector<int> screened_support;
};

// Plug-in estimators of E(eps_i^2):
//  - plugin_lasso: probabilities from an unweighted lasso fit, r by CV;
//  - lasso_then_logit: unpenalized logistic refit (Newton) on the screened
//    support; falls back to plugin_lasso values when the refit is infeasible
//    (support size >= n) or diverges (separation).
VarianceEstimate estimate_variances(const Dataset& data, VarianceMethod method,
                                    const CvControl& cv);

} // namespace slogit
