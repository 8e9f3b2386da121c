#include "slogit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slogit {

void Dataset::validate() const {
    if (n() < 1 || p() < 1) throw std::invalid_argument("dataset: n and p must be >= 1");
    if (y.size() != n()) throw std::invalid_argument("dataset: y length mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
            throw std::invalid_argument("dataset: y[" + std::to_string(i + 1) +
                                        "] is not 0 or 1");
    }
    if (f0 && f0->size() != n())
        throw std::invalid_argument("dataset: f0 length mismatch");
    for (std::size_t i = 0; i < n() * p(); ++i) {
        if (!std::isfinite(X.data()[i]))
            throw std::invalid_argument("dataset: non-finite design entry");
    }
}

GroupStructure::GroupStructure(std::vector<std::vector<int>> groups, std::size_t p)
    : groups_(std::move(groups)), p_(p) {
    std::vector<int> owner(p, -1);
    for (std::size_t l = 0; l < groups_.size(); ++l) {
        if (groups_[l].empty())
            throw std::invalid_argument("groups: group " + std::to_string(l + 1) +
                                        " is empty");
        for (int j : groups_[l]) {
            if (j < 0 || static_cast<std::size_t>(j) >= p)
                throw std::invalid_argument("groups: index out of range in group " +
                                            std::to_string(l + 1));
            if (owner[j] != -1)
                throw std::invalid_argument(
                    "groups: column " + std::to_string(j + 1) + " appears in groups " +
                    std::to_string(owner[j] + 1) + " and " + std::to_string(l + 1));
            owner[j] = static_cast<int>(l);
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (owner[j] == -1)
            throw std::invalid_argument("groups: column " + std::to_string(j + 1) +
                                        " not covered by any group");
    }
}

GroupStructure GroupStructure::singletons(std::size_t p) {
    std::vector<std::vector<int>> g(p);
    for (std::size_t j = 0; j < p; ++j) g[j] = {static_cast<int>(j)};
    return GroupStructure(std::move(g), p);
}

GroupStructure GroupStructure::contiguous(const std::vector<int>& sizes) {
    std::vector<std::vector<int>> g;
    int next = 0;
    for (int s : sizes) {
        if (s <= 0) throw std::invalid_argument("groups: nonpositive group size");
        std::vector<int> grp(static_cast<std::size_t>(s));
        for (int t = 0; t < s; ++t) grp[static_cast<std::size_t>(t)] = next++;
        g.push_back(std::move(grp));
    }
    return GroupStructure(std::move(g), static_cast<std::size_t>(next));
}

double group_norm(std::span<const double> beta, const std::vector<int>& group) {
    double s = 0.0;
    for (int j : group) s += beta[static_cast<std::size_t>(j)] * beta[static_cast<std::size_t>(j)];
    return std::sqrt(s);
}

double group_norm_21(std::span<const double> beta, const GroupStructure& groups) {
    double s = 0.0;
    for (std::size_t l = 0; l < groups.num_groups(); ++l)
        s += group_norm(beta, groups.group(l));
    return s;
}

double group_norm_2q(std::span<const double> beta, const GroupStructure& groups, double q) {
    double s = 0.0;
    for (std::size_t l = 0; l < groups.num_groups(); ++l)
        s += std::pow(group_norm(beta, groups.group(l)), q);
    return std::pow(s, 1.0 / q);
}

std::vector<int> support(std::span<const double> beta) {
    std::vector<int> out;
    for (std::size_t j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) out.push_back(static_cast<int>(j));
    return out;
}

std::vector<int> group_support(std::span<const double> beta, const GroupStructure& groups) {
    std::vector<int> out;
    for (std::size_t l = 0; l < groups.num_groups(); ++l)
        if (group_norm(beta, groups.group(l)) != 0.0) out.push_back(static_cast<int>(l));
    return out;
}

} // namespace slogit
