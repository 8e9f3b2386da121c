#pragma once

#include "slogit/linalg.hpp"

#include <optional>
#include <span>
#include <vector>

namespace slogit {

// A function evaluated at the n design points, e.g. (X*beta)_i.
using ScoreVector = Vector;

// Design matrix, binary responses, and (in simulations) the true score
// vector f0(z_i). Dictionary functions appear only through their column of
// evaluations.
struct Dataset {
    Matrix X;                  // n x p
    Vector y;                  // entries in {0,1}
    std::optional<Vector> f0;  // length n when present

    std::size_t n() const noexcept { return X.rows(); }
    std::size_t p() const noexcept { return X.cols(); }
    bool has_f0() const noexcept { return f0.has_value(); }

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

// Partition of {0,...,p-1} into disjoint covering groups (0-based indices).
class GroupStructure {
  public:
    GroupStructure(std::vector<std::vector<int>> groups, std::size_t p);

    static GroupStructure singletons(std::size_t p);
    static GroupStructure contiguous(const std::vector<int>& sizes);

    std::size_t num_groups() const noexcept { return groups_.size(); }
    std::size_t dimension() const noexcept { return p_; }
    const std::vector<int>& group(std::size_t l) const noexcept { return groups_[l]; }
    const std::vector<std::vector<int>>& groups() const noexcept { return groups_; }

  private:
    std::vector<std::vector<int>> groups_;
    std::size_t p_ = 0;
};

// || beta^l ||_2 for one group.
double group_norm(std::span<const double> beta, const std::vector<int>& group);
// sum_l || beta^l ||_2
double group_norm_21(std::span<const double> beta, const GroupStructure& groups);
// (sum_l || beta^l ||_2^q)^(1/q)
double group_norm_2q(std::span<const double> beta, const GroupStructure& groups, double q);

// Nonzero coefficient indices K(beta) and nonzero group indices J(beta).
// The solver produces exact zeros, so support is exact-zero based.
std::vector<int> support(std::span<const double> beta);
std::vector<int> group_support(std::span<const double> beta, const GroupStructure& groups);

} // namespace slogit
