#pragma once

#include "slogit/dataset.hpp"

#include <cstdint>
#include <optional>

namespace slogit {

enum class ReKind {
    lasso,          // l1 cone over coordinates,   ratio ||X d||_2 / (sqrt(n) ||d_K||_2)
    group,          // l2,1 cone over groups,      same ratio
    weighted_group  // l2,1 cone over groups,      ratio d^T X^T D X d / (n ||d_K||_2^2)
};

struct ReQuery {
    int s = 1;       // subset size bound
    double a0 = 3.0; // cone constant
    ReKind kind = ReKind::lasso;
    std::optional<GroupStructure> groups; // required for group kinds
    std::optional<Vector> variances;      // required for weighted_group (diag of D)
};

struct ReBudget {
    int directions = 2000;   // random cone directions per subset
    int descent_steps = 50;  // projected-descent refinements per subset
    bool allow_subset_sampling = false;
    int sampled_subsets = 4096;      // used when enumeration is infeasible
    std::size_t max_subsets = 20000; // enumeration feasibility cap
    std::uint64_t seed = 0;
};

struct ReEstimate {
    double value = 0.0;
    bool certified_upper = true; // witness-based upper bound on the true constant
    Vector witness;
    std::vector<int> witness_index_set; // the subset K realizing the value
    std::uint64_t budget_used = 0;      // ratio evaluations performed
    double value_squared() const { return value * value; }
};

// ||d_{K^c}|| <= a0 ||d_K|| with the l1 norm (lasso) or the l2,1 group norm;
// K holds coordinate indices (lasso) or group indices (group kinds).
bool cone_membership(std::span<const double> delta, const std::vector<int>& K, double a0,
                     ReKind kind, const GroupStructure* groups);

// Witness-certified upper bound on the restricted-eigenvalue constant:
// enumerates subsets |K| <= s (or samples them under the budget override),
// minimizes the Rayleigh-type ratio over the cone by random directions plus
// projected local descent. warm_starts are extra candidate directions
// evaluated against every subset (useful for nested-query monotonicity).
ReEstimate re_constant(const Matrix& X, const ReQuery& query, const ReBudget& budget = {},
                       std::span<const Vector> warm_starts = {});

} // namespace slogit
