#include "slogit/oracle_bounds.hpp"

#include "common.hpp"
#include "slogit/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace slogit;
using testutil::random_dataset;
using testutil::random_vector;

namespace {

OracleConstants reference_constants() {
    // M = 1, f0 in {-1, +1}: c0 = e^{-1}, c0' = e - 2, eps0 = pi(1)(1-pi(1)).
    OracleConstants k;
    k.C0 = 0.0;
    k.c1 = 1.0;
    k.eps0 = sigmoid(1.0) * (1.0 - sigmoid(1.0));
    k.c0 = std::exp(-1.0);
    k.c0_prime = std::exp(1.0) - 2.0;
    k.eta = 1.0;
    k.c_eta = 4.5;
    return k;
}

constexpr double kMaxW = 0.32202960428694929;

PenaltyWeights uniform_weights(std::size_t count, double value, WeightMode mode) {
    return PenaltyWeights{Vector(count, value), mode};
}

} // namespace

TEST_CASE("constants from data") {
    CHECK(c_eta_of(1.0) == doctest::Approx(4.5));
    CHECK(c_eta_of(2.0) == doctest::Approx(2.0 * 4.0 / 3.0));
    CHECK_THROWS_AS((void)c_eta_of(0.0), std::invalid_argument);

    Dataset d = random_dataset(6, 2, 88);
    d.f0 = Vector{1.0, -1.0, 0.5, -0.25, 1.0, 0.0};
    const OracleConstants k = compute_constants(d, 0.0, 1.0);
    CHECK(k.c1 == doctest::Approx(1.0));
    CHECK(k.M() == doctest::Approx(1.0));
    CHECK(k.c0 == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(k.c0_prime == doctest::Approx(0.71828182845904523).epsilon(1e-14));
    CHECK(k.eps0 == doctest::Approx(0.19661193324148185).epsilon(1e-13));
    CHECK(k.c_eta == doctest::Approx(4.5));

    d.f0 = Vector(6, 800.0); // pi(1-pi) underflows: bounds undefined
    CHECK_THROWS_AS((void)compute_constants(d, 0.0, 1.0), std::domain_error);
    Dataset no_f0 = d;
    no_f0.f0.reset();
    CHECK_THROWS_AS((void)compute_constants(no_f0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("M -> 0 limit of the sandwich constants") {
    Dataset d = random_dataset(4, 2, 3);
    d.f0 = Vector(4, 0.0);
    const OracleConstants k = compute_constants(d, 0.0, 1.0);
    CHECK(k.c0 == doctest::Approx(0.5));
    CHECK(k.c0_prime == doctest::Approx(0.5));
    CHECK(k.eps0 == doctest::Approx(0.25));
}

TEST_CASE("slow-rate bound") {
    // beta0 = (1.5, -1, 2, 0, ...): ||beta0||_1 = 4.5
    Vector beta0(10, 0.0);
    beta0[0] = 1.5;
    beta0[1] = -1.0;
    beta0[2] = 2.0;
    const PenaltyWeights w = uniform_weights(10, kMaxW, WeightMode::coefficient);
    CHECK(slow_rate_bound(beta0, 1.0, w, 0.0) ==
          doctest::Approx(2.8982664385825436).epsilon(1e-13));

    PenaltyWeights w2 = w;
    for (double& v : w2.values) v *= 2.0;
    CHECK(slow_rate_bound(beta0, 1.0, w2, 0.0) ==
          doctest::Approx(2.0 * 2.8982664385825436).epsilon(1e-13));

    CHECK(slow_rate_bound(Vector(10, 0.0), 1.0, w, 0.0) == doctest::Approx(0.0));
    CHECK(slow_rate_bound(beta0, 1.0, w, 0.125) ==
          doctest::Approx(0.125 + 2.8982664385825436).epsilon(1e-13));
    CHECK_THROWS_AS((void)slow_rate_bound(beta0, 1.0, w, -1e-6), std::invalid_argument);

    // group mode: l2,1 norm
    const GroupStructure groups = GroupStructure::contiguous({2, 2, 2, 2, 2});
    const PenaltyWeights gw = uniform_weights(5, 0.5, WeightMode::group);
    const double l21 = group_norm_21(beta0, groups);
    CHECK(slow_rate_bound(beta0, 2.0, gw, 0.0, &groups) ==
          doctest::Approx(2.0 * 2.0 * l21 * 0.5).epsilon(1e-13));
    CHECK_THROWS_AS((void)slow_rate_bound(beta0, 1.0, gw, 0.0), std::invalid_argument);
}

TEST_CASE("fast-rate variance term and composition") {
    const OracleConstants k = reference_constants();
    const PenaltyWeights w = uniform_weights(6, kMaxW, WeightMode::group);

    CHECK(fast_rate_bound(0, 1.0, w, 1.0, k, BoundTarget::excess_risk) == 0.0);
    CHECK(fast_rate_bound(3, 1.0, w, 1.0, k, BoundTarget::excess_risk) ==
          doctest::Approx(19.355748640372692).epsilon(1e-12));

    // scales exactly as (max w)^2
    PenaltyWeights w3 = w;
    for (double& v : w3.values) v *= 3.0;
    CHECK(fast_rate_bound(3, 1.0, w3, 1.0, k, BoundTarget::excess_risk) ==
          doctest::Approx(9.0 * 19.355748640372692).epsilon(1e-12));
    // and as r^2
    CHECK(fast_rate_bound(3, 2.0, w, 1.0, k, BoundTarget::excess_risk) ==
          doctest::Approx(4.0 * 19.355748640372692).epsilon(1e-12));

    const double v_ex = fast_rate_bound(3, 1.0, w, 1.0, k, BoundTarget::excess_risk);
    const double v_nm = fast_rate_bound(3, 1.0, w, 1.0, k, BoundTarget::empirical_norm);
    CHECK(v_nm == doctest::Approx(v_ex * 4.0 / (k.c0_prime * k.eps0)).epsilon(1e-13));

    CHECK(fast_rate_oracle_rhs(0.25, v_ex, k, BoundTarget::excess_risk) ==
          doctest::Approx(2.0 * (0.25 + v_ex)).epsilon(1e-13));
    CHECK(fast_rate_oracle_rhs(0.25, v_nm, k, BoundTarget::empirical_norm) ==
          doctest::Approx(2.0 * (0.25 + v_nm) * k.c0_prime / (4.0 * k.c0 * k.eps0))
              .epsilon(1e-13));

    CHECK_THROWS_AS((void)fast_rate_bound(3, 1.0, w, 0.0, k, BoundTarget::excess_risk),
                    std::invalid_argument);
}

TEST_CASE("linear-case corollary displays (lasso)") {
    const OracleConstants k = reference_constants();
    const PenaltyWeights w = uniform_weights(10, kMaxW, WeightMode::coefficient);
    Vector beta0(10, 0.0);
    beta0[0] = 1.5;
    beta0[1] = -1.0;
    beta0[2] = 2.0;
    ReEstimate mu;
    mu.value = 1.0;

    const BoundReport rep = linear_case_bounds(beta0, 1.0, w, mu, k, nullptr, 2.0);
    CHECK(rep.get("s") == doctest::Approx(3.0));
    CHECK(rep.get("excess_risk_bound") ==
          doctest::Approx(38.711497280745385).epsilon(1e-12));
    CHECK(rep.get("empirical_norm_sq_bound") ==
          doctest::Approx(1605.6313247494746).epsilon(1e-12)); // s^2 display
    CHECK(rep.get("l1_bound") == doctest::Approx(160.28131892392074).epsilon(1e-12));
    CHECK(rep.get("lq_bound") ==
          doctest::Approx(160.28131892392074 * 160.28131892392074).epsilon(1e-12));
    CHECK(rep.get_flag("optimistic"));

    const BoundReport zero =
        linear_case_bounds(Vector(10, 0.0), 1.0, w, mu, k, nullptr, 2.0);
    CHECK(zero.get("excess_risk_bound") == 0.0);
    CHECK(zero.get("empirical_norm_sq_bound") == 0.0);
    CHECK(zero.get("l1_bound") == 0.0);
    CHECK(zero.get("lq_bound") == 0.0);
}

TEST_CASE("linear-case corollary displays (group): s, not s^2, in the norm bound") {
    const OracleConstants k = reference_constants();
    const GroupStructure groups = GroupStructure::contiguous({2, 2, 2, 2, 2});
    const PenaltyWeights w = uniform_weights(5, kMaxW, WeightMode::group);
    Vector beta0(10, 0.0);
    beta0[0] = 1.0;
    beta0[3] = -1.0;
    beta0[4] = 0.5;
    // groups {0}, {1}, {2} of the partition are active -> s = 3
    const BoundReport rep = linear_case_bounds(beta0, 1.0, w, ReEstimate{1.0, true, {}, {}, 0},
                                               k, &groups, 1.5);
    CHECK(rep.get("s") == doctest::Approx(3.0));
    CHECK(rep.get("excess_risk_bound") ==
          doctest::Approx(38.711497280745385).epsilon(1e-12));
    CHECK(rep.get("empirical_norm_sq_bound") ==
          doctest::Approx(535.21044158315820).epsilon(1e-12));
    CHECK(rep.get("l21_bound") == doctest::Approx(160.28131892392074).epsilon(1e-12));
    CHECK(rep.get("lq_bound") ==
          doctest::Approx(std::pow(160.28131892392074, 1.5)).epsilon(1e-12));
}

TEST_CASE("lq power bound") {
    CHECK(lq_power_bound(1.0, 1.5) == doctest::Approx(1.0));
    CHECK(lq_power_bound(0.0, 2.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)lq_power_bound(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)lq_power_bound(1.0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS((void)lq_power_bound(-1.0, 1.5), std::invalid_argument);

    // random-search falsification: sum a_j <= b1 implies sum a_j^q <= b1^q
    auto rng = make_rng(404, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double q = 1.0 + unif(rng);
        Vector a(8);
        double sum = 0.0;
        for (double& x : a) {
            x = unif(rng);
            sum += x;
        }
        const double b1 = sum * (1.0 + unif(rng));
        double power_sum = 0.0;
        for (double x : a) power_sum += std::pow(x, q);
        CHECK(power_sum <= lq_power_bound(b1, q) + 1e-12);
    }
}

TEST_CASE("unbounded-case bounds and side condition") {
    // 6 groups of size 2; first 3 relevant.
    const GroupStructure groups = GroupStructure::contiguous({2, 2, 2, 2, 2, 2});
    Vector beta0(12, 0.0);
    beta0[0] = 1.0;
    beta0[2] = -1.0;
    beta0[4] = 0.5;
    Dataset d = random_dataset(9, 12, 2);
    const PenaltyWeights w = uniform_weights(6, 0.3, WeightMode::group);
    ReEstimate mu2;
    mu2.value = std::sqrt(2.0); // squared convention: mu2^2 = 2 in the displays

    const BoundReport rep = unbounded_case_bounds(beta0, 1.0, w, mu2, d, groups, 1.5);
    CHECK(rep.get("a0") == doctest::Approx(3.0)); // uniform weights
    CHECK(rep.get("s") == doctest::Approx(3.0));
    CHECK(rep.get("l21_bound") == doctest::Approx(43.2).epsilon(1e-12));
    CHECK(rep.get("excess_risk_bound") ==
          doctest::Approx(9.0 * 16.0 * 3.0 * 0.09 / 2.0).epsilon(1e-12));
    CHECK(rep.get("lq_bound") == doctest::Approx(283.93937381067811).epsilon(1e-12));
    CHECK(rep.get("mu2_squared") == doctest::Approx(2.0).epsilon(1e-14));

    // v from this design is O(1), s = 3, so r (1+a0)^2 W = 4.8 >> mu2^2/(3 v s)
    CHECK_FALSE(rep.get_flag("side_condition"));
    CHECK(rep.get_flag("prediction_bound_available"));
    CHECK(rep.get("prediction_bound") ==
          doctest::Approx(36.0 * 16.0 * 3.0 * 0.09 / (2.0 * rep.get("eps0")))
              .epsilon(1e-12));

    // beta0 = 0: everything zero, side condition trivially satisfiable
    const BoundReport zero = unbounded_case_bounds(Vector(12, 0.0), 1.0, w, mu2, d,
                                                   groups, 1.5);
    CHECK(zero.get("excess_risk_bound") == 0.0);
    CHECK(zero.get("l21_bound") == 0.0);
    CHECK(zero.get_flag("side_condition"));
}

TEST_CASE("unbounded-case v computation") {
    // hand-checkable rows
    Dataset d;
    d.X = Matrix(2, 4);
    d.X(0, 0) = 3.0;
    d.X(0, 1) = 4.0; // row 0, group 0: norm 5
    d.X(1, 2) = 1.0;
    d.X(1, 3) = 1.0; // row 1, group 1: norm sqrt(2)
    d.y = {0.0, 1.0};
    const GroupStructure groups = GroupStructure::contiguous({2, 2});
    const PenaltyWeights w = uniform_weights(2, 1.0, WeightMode::group);
    Vector beta0(4, 0.0);
    beta0[0] = 1.0;
    ReEstimate mu2;
    mu2.value = 1.0;
    const BoundReport rep = unbounded_case_bounds(beta0, 1.0, w, mu2, d, groups, 2.0);
    CHECK(rep.get("v") == doctest::Approx(5.0));
    CHECK(rep.get("side_condition_rhs") == doctest::Approx(1.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("hoeffding effective weight") {
    CHECK(hoeffding_effective_weight(2.0, 100, 10) ==
          doctest::Approx(2.0 * std::sqrt(std::log(10.0) / 100.0)).epsilon(1e-14));
    CHECK_THROWS_AS((void)hoeffding_effective_weight(0.0, 10, 10), std::invalid_argument);
}

TEST_CASE("l81 sandwich with computed constants on random bounded scores") {
    Vector truth{0.6, -0.4, 0.2};
    Dataset d = random_dataset(30, 3, 515, &truth);
    const double C0 = 4.0;
    const OracleConstants k = compute_constants(d, C0, 1.0);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        Vector beta = random_vector(3, 7000 + static_cast<std::uint64_t>(t));
        Vector f = matvec(d.X, beta);
        const double m = norm_inf(f);
        if (m > C0) {
            const double scale = C0 / m;
            for (double& b : beta) b *= scale;
            for (double& x : f) x *= scale;
        }
        const double ex = excess_risk(beta, d);
        const double nn = empirical_norm_sq(f, *d.f0);
        CHECK(k.c0 * k.eps0 * nn <= ex + 1e-10);
        CHECK(ex <= 0.25 * k.c0_prime * nn + 1e-10);
        ++checked;
    }
    CHECK(checked == 1000);
}
