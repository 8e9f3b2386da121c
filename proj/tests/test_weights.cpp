#include "slogit/weights.hpp"

#include "common.hpp"
#include "slogit/simulation.hpp"

#include <doctest.h>

#include <cmath>

using namespace slogit;
using testutil::random_dataset;

namespace {

// n=100, all entries 1: column sums of squares 100, c2 = 1.
Dataset ones_dataset(std::size_t n = 100, std::size_t p = 10) {
    Dataset d;
    d.X = Matrix(n, p, 1.0);
    d.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; i += 2) d.y[i] = 1.0;
    return d;
}

} // namespace

TEST_CASE("lasso Bernstein weights: frozen hand evaluation") {
    const Dataset d = ones_dataset();
    const PenaltyWeights w = lasso_bernstein_weights(d, TailParams{2.0, 1.0});
    REQUIRE(w.values.size() == 10);
    for (double v : w.values)
        CHECK(v == doctest::Approx(0.32202960428694929).epsilon(1e-14));
    CHECK(w.mode == WeightMode::coefficient);
}

TEST_CASE("lasso Bernstein weights: zero column and homogeneity") {
    Dataset d = ones_dataset(50, 3);
    for (std::size_t i = 0; i < 50; ++i) d.X(i, 1) = 0.0;          // zero column
    for (std::size_t i = 0; i < 50; ++i) d.X(i, 2) = 2.0;          // doubled column
    const TailParams tail{2.0, 2.0};
    const PenaltyWeights w = lasso_bernstein_weights(d, tail);
    const double n = 50.0, xl = 2.0 + std::log(3.0);
    const double second = 2.0 * 2.0 * xl / (3.0 * n);
    CHECK(w.values[1] == doctest::Approx(second).epsilon(1e-15));
    const double first0 = w.values[0] - second;
    const double first2 = w.values[2] - second;
    CHECK(first2 == doctest::Approx(2.0 * first0).epsilon(1e-13));
}

TEST_CASE("group Bernstein weights: frozen hand evaluation and reduction") {
    const Dataset d = ones_dataset();
    const TailParams tail{2.0, 1.0};

    // |G_l| = 4 with the same per-column sums quadruples the lasso weight.
    std::vector<std::vector<int>> g4{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9}};
    const PenaltyWeights wg =
        group_bernstein_weights(d, GroupStructure(g4, 10), tail);
    CHECK(wg.values[0] == doctest::Approx(1.2881184171477972).epsilon(1e-14));
    CHECK(wg.mode == WeightMode::group);

    // Singleton groups reduce to the lasso weights exactly.
    const PenaltyWeights ws =
        group_bernstein_weights(d, GroupStructure::singletons(10), tail);
    const PenaltyWeights wl = lasso_bernstein_weights(d, tail);
    for (std::size_t j = 0; j < 10; ++j)
        CHECK(std::fabs(ws.values[j] - wl.values[j]) <= 1e-14 * wl.values[j]);
}

TEST_CASE("group Bernstein weights: duplicated column inside a group") {
    Dataset d = random_dataset(30, 4, 12);
    for (std::size_t i = 0; i < 30; ++i) d.X(i, 1) = d.X(i, 0); // duplicate, same max
    const TailParams tail{2.0, 0.0};
    std::vector<std::vector<int>> grp{{0, 1}, {2, 3}};
    const PenaltyWeights w1 = group_bernstein_weights(d, GroupStructure(grp, 4), tail);
    // Dropping the duplicate changes |G_l|; rescale to compare the max term.
    Dataset d2 = d;
    for (std::size_t i = 0; i < 30; ++i) d2.X(i, 1) = 0.0;
    const PenaltyWeights w2 = group_bernstein_weights(d2, GroupStructure(grp, 4), tail);
    CHECK(w1.values[0] == doctest::Approx(w2.values[0]).epsilon(1e-13));
}

TEST_CASE("theoretical weights: frozen hand evaluation") {
    const Dataset d = ones_dataset();
    std::vector<std::vector<int>> grp{{0, 1}, {2, 3, 4}, {5, 6, 7, 8, 9}};
    const Vector variances(100, 0.25); // max_j sum X^2 var = 25
    const PenaltyWeights w =
        group_theoretical_weights(d, GroupStructure(grp, 10), TailParams{2.0, 1.0},
                                  variances);
    CHECK(w.values[0] == doctest::Approx(0.64405920857389858).epsilon(1e-14));
}

TEST_CASE("theoretical weights: zero variances leave only the tail term") {
    const Dataset d = ones_dataset(60, 4);
    const Vector variances(60, 0.0);
    const PenaltyWeights w = group_theoretical_weights(
        d, GroupStructure::singletons(4), TailParams{2.0, 1.0}, variances);
    const double xl = 2.0 + std::log(4.0);
    for (double v : w.values)
        CHECK(v == doctest::Approx(2.0 * 1.0 * xl / (3.0 * 60.0)).epsilon(1e-14));
}

TEST_CASE("theoretical weights coincide with Bernstein at variance 1/4") {
    // The coincidence needs max_i |X_ij| = c2 in every column; plant a
    // common extreme entry.
    Dataset d = random_dataset(40, 6, 3);
    for (std::size_t j = 0; j < 6; ++j) d.X(0, j) = 5.0;
    const Vector variances(40, 0.25);
    const TailParams tail{2.0, 0.0};
    const PenaltyWeights wt = lasso_theoretical_weights(d, tail, variances);
    const PenaltyWeights wb = lasso_bernstein_weights(d, tail);
    for (std::size_t j = 0; j < 6; ++j)
        CHECK(std::fabs(wt.values[j] - wb.values[j]) <= 1e-14 * wb.values[j]);
}

TEST_CASE("weights invariants: positivity, x-monotonicity, domination") {
    const Dataset d = random_dataset(35, 8, 21);
    std::vector<std::vector<int>> grp{{0, 1, 2}, {3, 4}, {5, 6, 7}};
    const GroupStructure groups(grp, 8);
    Vector variances(35);
    for (std::size_t i = 0; i < 35; ++i)
        variances[i] = 0.25 * (0.2 + 0.8 * static_cast<double>(i % 7) / 6.0);

    PenaltyWeights prev;
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        const TailParams tail{x, 0.0};
        const PenaltyWeights wb = group_bernstein_weights(d, groups, tail);
        wb.validate();
        const PenaltyWeights wt = group_theoretical_weights(d, groups, tail, variances);
        wt.validate();
        for (std::size_t l = 0; l < 3; ++l) {
            CHECK(wt.values[l] <= wb.values[l] * (1.0 + 1e-14)); // term domination
            if (!prev.values.empty()) CHECK(wb.values[l] > prev.values[l]);
        }
        prev = wb;
    }
    CHECK_THROWS_AS((void)lasso_bernstein_weights(d, TailParams{-1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)lasso_bernstein_weights(d, TailParams{2.0, -3.0}),
                    std::invalid_argument);
    Vector bad(35, 0.3);
    CHECK_THROWS_AS((void)group_theoretical_weights(d, groups, TailParams{2.0, 0.0}, bad),
                    std::invalid_argument);
}

TEST_CASE("estimate_variances: zero stage-one fit gives 1/4 everywhere") {
    Vector truth{1.0, -0.5, 0.0, 0.0};
    const Dataset d = random_dataset(60, 4, 91, &truth);
    CvControl cv;
    cv.grid_count = 1; // grid = {r_max}: the stage-one lasso is all-zero
    cv.seed = 4;
    const VarianceEstimate est = estimate_variances(d, VarianceMethod::plugin_lasso, cv);
    REQUIRE(est.variances.size() == 60);
    for (double v : est.variances) CHECK(v == doctest::Approx(0.25));
    CHECK(est.screened_support.empty());

    const VarianceEstimate est2 =
        estimate_variances(d, VarianceMethod::lasso_then_logit, cv);
    for (double v : est2.variances) CHECK(v == doctest::Approx(0.25));
    CHECK_FALSE(est2.fallback_used);
}

TEST_CASE("estimate_variances: separable data falls back to plugin values") {
    Dataset d;
    d.X = Matrix(8, 1);
    d.y.resize(8);
    for (std::size_t i = 0; i < 8; ++i) {
        d.X(i, 0) = (i < 4 ? 1.0 : -1.0) * (1.0 + 0.25 * static_cast<double>(i % 4));
        d.y[i] = i < 4 ? 1.0 : 0.0;
    }
    CvControl cv;
    cv.grid_count = 12;
    cv.folds = 2;
    cv.seed = 9;
    const VarianceEstimate plug = estimate_variances(d, VarianceMethod::plugin_lasso, cv);
    const VarianceEstimate logit =
        estimate_variances(d, VarianceMethod::lasso_then_logit, cv);
    CHECK(logit.fallback_used);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(logit.variances[i] == doctest::Approx(plug.variances[i]));
}

TEST_CASE("estimate_variances: Monte-Carlo accuracy on a well-specified model") {
    Vector truth{1.0, -0.5, 0.5, 0.0, 0.0};
    const Dataset d = random_dataset(500, 5, 2024, &truth);
    CvControl cv;
    cv.grid_count = 20;
    cv.seed = 11;
    for (VarianceMethod m :
         {VarianceMethod::plugin_lasso, VarianceMethod::lasso_then_logit}) {
        const VarianceEstimate est = estimate_variances(d, m, cv);
        double err = 0.0;
        for (std::size_t i = 0; i < d.n(); ++i) {
            const double pi = sigmoid((*d.f0)[i]);
            err += std::fabs(est.variances[i] - pi * (1.0 - pi));
        }
        err /= static_cast<double>(d.n());
        CHECK(err <= 0.05);
        for (double v : est.variances) {
            CHECK(v >= 1e-6);
            CHECK(v <= 0.25);
        }
    }
}
