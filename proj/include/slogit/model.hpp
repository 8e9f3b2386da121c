#pragma once

#include "slogit/dataset.hpp"

#include <span>

namespace slogit {

// pi(t) = exp(t)/(1+exp(t)), overflow-safe.
double sigmoid(double t) noexcept;
// log(1+exp(t)), branch at t = 0 so the naive form never overflows.
double log1pexp(double t) noexcept;

void sigmoid_inplace(std::span<const double> t, std::span<double> out) noexcept;

// f_beta evaluated at the design points: X * beta.
ScoreVector scores(const Matrix& X, std::span<const double> beta);

// (1/n) sum_i [ log(1+exp(f_i)) - y_i f_i ] at f = X beta.
double empirical_risk(std::span<const double> beta, const Dataset& data);
double empirical_risk_at(std::span<const double> f, const Dataset& data);

// Expectation of the empirical risk; requires f0 (E y_i = pi(f0_i)).
double population_risk(std::span<const double> beta, const Dataset& data);
double population_risk_at(std::span<const double> f, const Dataset& data);
// R evaluated at the truth f0 itself.
double population_risk_at_truth(const Dataset& data);

// grad R_hat(beta) = (1/n) X^T (pi(X beta) - y)
Vector risk_gradient(std::span<const double> beta, const Dataset& data);

// R(f_beta) - R(f0); nonnegative up to round-off when well-specified.
double excess_risk(std::span<const double> beta, const Dataset& data);

// (1/n) sum_i (f_i - g_i)^2
double empirical_norm_sq(std::span<const double> f, std::span<const double> g);

// <h1,h2>_g = (1/n) sum_i h1_i h2_i pi(g_i)(1-pi(g_i))
double weighted_inner_product(std::span<const double> h1, std::span<const double> h2,
                              std::span<const double> g);

// q_f(h) = (1/n) sum_i h_i (y_i - pi(f_i))
double q_residual(std::span<const double> f, std::span<const double> h,
                  const Dataset& data);

// Self-concordance control of the excess risk along a perturbation h:
//   lower <= middle <= upper, where
//   middle = R(f+h) - R(f) + (q_f - q_{f0})(h)  (population form; equals the
//            empirical form R_hat(f+h) - R_hat(f) + q_f(h) identically)
//   lower/upper = <h,h>_f * (exp(-+m) +- m - 1)/m^2 at m = max_i |h_i|,
//   with the removable singularity at m = 0 evaluated as 1/2.
struct ConcordanceGap {
    double lower = 0.0;
    double middle = 0.0;
    double upper = 0.0;
};
ConcordanceGap self_concordance_gap(std::span<const double> f, std::span<const double> h,
                                    const Dataset& data);

// (exp(-m)+m-1)/m^2 and (exp(m)-m-1)/m^2, both -> 1/2 as m -> 0.
double concordance_lower_factor(double m) noexcept;
double concordance_upper_factor(double m) noexcept;

} // namespace slogit
