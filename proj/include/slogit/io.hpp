#pragma once

#include "slogit/dataset.hpp"
#include "slogit/oracle_bounds.hpp"
#include "slogit/simulation.hpp"
#include "slogit/solver.hpp"
#include "slogit/weights.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slogit {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip-exact decimal representation.
std::string format_double(double v);

// Writes via a temporary file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& content);

// Dataset CSV: header "y,x1,...,xp" with an optional trailing "f0" column;
// '.' decimal, no thousands separators. Errors carry 1-based line numbers.
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);

// Groups file: JSON array of arrays of 1-based column indices forming a
// partition of {1..p}.
GroupStructure read_groups_json(const std::string& path, std::size_t p);

// Weights CSV: "# ..." comment lines, a "unit,weight" header, then rows.
Vector read_weights_csv(const std::string& path);
std::string weights_to_csv(const PenaltyWeights& weights, std::uint64_t seed);

// One value per line after optional comments/header ("variance" rows).
Vector read_values_csv(const std::string& path);

std::string fit_result_to_json(const FitResult& fit, WeightMode mode,
                               std::uint64_t seed);
std::string path_to_csv(const std::vector<FitResult>& path, std::uint64_t seed);
std::string monte_carlo_rows_csv(const MonteCarloReport& report, std::uint64_t seed);
std::string monte_carlo_aggregates_csv(const MonteCarloReport& report,
                                       std::uint64_t seed);
std::string bound_report_to_json(const BoundReport& report);

} // namespace slogit
