#include "slogit/model.hpp"

#include "slogit/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace slogit {

double sigmoid(double t) noexcept {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double log1pexp(double t) noexcept {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void sigmoid_inplace(std::span<const double> t, std::span<double> out) noexcept {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = sigmoid(t[i]);
}

ScoreVector scores(const Matrix& X, std::span<const double> beta) {
    return matvec(X, beta);
}

namespace {

// log(1+exp(f)) - y*f for y in {0,1}, computed without cancellation:
// for y = 1 this is identically log(1+exp(-f)).
inline double binary_loss_term(double f, double y) noexcept {
    return y == 1.0 ? log1pexp(-f) : log1pexp(f);
}

// log(1+exp(f)) - pi0*f for pi0 in [0,1].
inline double mean_loss_term(double f, double pi0) noexcept {
    if (f > 0.0) return (1.0 - pi0) * f + log1pexp(-f);
    return log1pexp(f) - pi0 * f;
}

} // namespace

double empirical_risk_at(std::span<const double> f, const Dataset& data) {
    if (f.size() != data.n()) throw std::invalid_argument("empirical_risk: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += binary_loss_term(f[i], data.y[i]);
    return s / static_cast<double>(data.n());
}

double empirical_risk(std::span<const double> beta, const Dataset& data) {
    if (beta.size() != data.p()) throw std::invalid_argument("empirical_risk: dim mismatch");
    return empirical_risk_at(matvec(data.X, beta), data);
}

double population_risk_at(std::span<const double> f, const Dataset& data) {
    if (!data.has_f0()) throw std::invalid_argument("population_risk: f0 required");
    if (f.size() != data.n()) throw std::invalid_argument("population_risk: length mismatch");
    const Vector& f0 = *data.f0;
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += mean_loss_term(f[i], sigmoid(f0[i]));
    return s / static_cast<double>(data.n());
}

double population_risk(std::span<const double> beta, const Dataset& data) {
    if (beta.size() != data.p()) throw std::invalid_argument("population_risk: dim mismatch");
    return population_risk_at(matvec(data.X, beta), data);
}

double population_risk_at_truth(const Dataset& data) {
    if (!data.has_f0()) throw std::invalid_argument("population_risk: f0 required");
    return population_risk_at(*data.f0, data);
}

Vector risk_gradient(std::span<const double> beta, const Dataset& data) {
    if (beta.size() != data.p()) throw std::invalid_argument("risk_gradient: dim mismatch");
    Vector f = matvec(data.X, beta);
    Vector resid(data.n());
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = sigmoid(f[i]) - data.y[i];
    Vector g = matvec_transpose(data.X, resid);
    const double inv_n = 1.0 / static_cast<double>(data.n());
    for (double& v : g) v *= inv_n;
    return g;
}

double excess_risk(std::span<const double> beta, const Dataset& data) {
    return population_risk(beta, data) - population_risk_at_truth(data);
}

double empirical_norm_sq(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size()) throw std::invalid_argument("empirical_norm_sq: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f[i] - g[i];
        s += d * d;
    }
    return s / static_cast<double>(f.size());
}

double weighted_inner_product(std::span<const double> h1, std::span<const double> h2,
                              std::span<const double> g) {
    if (h1.size() != h2.size() || h1.size() != g.size())
        throw std::invalid_argument("weighted_inner_product: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        const double pi = sigmoid(g[i]);
        s += h1[i] * h2[i] * pi * (1.0 - pi);
    }
    return s / static_cast<double>(h1.size());
}

double q_residual(std::span<const double> f, std::span<const double> h,
                  const Dataset& data) {
    if (f.size() != data.n() || h.size() != data.n())
        throw std::invalid_argument("q_residual: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += h[i] * (data.y[i] - sigmoid(f[i]));
    return s / static_cast<double>(data.n());
}

double concordance_lower_factor(double m) noexcept {
    if (m < 1e-4) return 0.5 - m / 6.0 + m * m / 24.0;
    return (std::expm1(-m) + m) / (m * m);
}

double concordance_upper_factor(double m) noexcept {
    if (m < 1e-4) return 0.5 + m / 6.0 + m * m / 24.0;
    return (std::expm1(m) - m) / (m * m);
}

ConcordanceGap self_concordance_gap(std::span<const double> f, std::span<const double> h,
                                    const Dataset& data) {
    if (f.size() != data.n() || h.size() != data.n())
        throw std::invalid_argument("self_concordance_gap: length mismatch");
    Vector fh(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) fh[i] = f[i] + h[i];

    // Empirical form of the middle term; by R = R_hat + q_{f0} it coincides
    // with R(f+h) - R(f) + (q_f - q_{f0})(h) whether or not f0 is known.
    const double middle =
        empirical_risk_at(fh, data) - empirical_risk_at(f, data) + q_residual(f, h, data);

    const double m = norm_inf(h);
    const double hh_f = weighted_inner_product(h, h, f);
    return ConcordanceGap{hh_f * concordance_lower_factor(m), middle,
                          hh_f * concordance_upper_factor(m)};
}

} // namespace slogit
