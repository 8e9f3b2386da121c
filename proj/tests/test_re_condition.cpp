#include "slogit/re_condition.hpp"

#include "common.hpp"

#include <doctest.h>

#include <cmath>

using namespace slogit;
using testutil::random_dataset;

TEST_CASE("cone membership") {
    const GroupStructure groups = GroupStructure::contiguous({2, 2});

    SUBCASE("supported on K is always inside; on K^c never") {
        Vector d{1.0, 0.0, 0.0, 0.0};
        CHECK(cone_membership(d, {0}, 0.01, ReKind::lasso, nullptr));
        CHECK_FALSE(cone_membership(d, {1}, 100.0, ReKind::lasso, nullptr));
        CHECK(cone_membership(d, {0}, 0.01, ReKind::group, &groups));
        CHECK_FALSE(cone_membership(d, {1}, 100.0, ReKind::group, &groups));
    }

    SUBCASE("boundary is inside, epsilon beyond is outside") {
        const double a0 = 3.0;
        CHECK(cone_membership(Vector{1.0, a0}, {0}, a0, ReKind::lasso, nullptr));
        CHECK_FALSE(
            cone_membership(Vector{1.0, a0 + 1e-6}, {0}, a0, ReKind::lasso, nullptr));
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(
            (void)cone_membership(Vector{1.0, 0.0}, {}, 3.0, ReKind::lasso, nullptr),
            std::invalid_argument);
        CHECK_THROWS_AS((void)cone_membership(Vector{1.0, 0.0}, {0}, -1.0, ReKind::lasso,
                                              nullptr),
                        std::invalid_argument);
    }
}

namespace {

Matrix scaled_identity(std::size_t n, double scale) {
    Matrix X(n, n);
    for (std::size_t i = 0; i < n; ++i) X(i, i) = scale;
    return X;
}

ReBudget small_budget(std::uint64_t seed = 0) {
    ReBudget b;
    b.directions = 300;
    b.descent_steps = 25;
    b.seed = seed;
    return b;
}

} // namespace

TEST_CASE("orthonormal design gives exactly 1") {
    const std::size_t n = 4; // sqrt(4)^2 is exact
    const Matrix X = scaled_identity(n, std::sqrt(static_cast<double>(n)));
    for (int s : {1, 2}) {
        ReQuery q;
        q.s = s;
        q.a0 = 3.0;
        q.kind = ReKind::lasso;
        const ReEstimate est = re_constant(X, q, small_budget());
        CHECK(std::fabs(est.value - 1.0) <= 1e-9);
        CHECK(est.certified_upper);
        CHECK(cone_membership(est.witness, est.witness_index_set, q.a0, q.kind, nullptr));
    }
}

TEST_CASE("duplicated columns give exactly 0 with a difference witness") {
    Dataset d = random_dataset(10, 4, 31);
    for (std::size_t i = 0; i < 10; ++i) d.X(i, 1) = d.X(i, 0);
    ReQuery q;
    q.s = 1;
    q.a0 = 1.0;
    q.kind = ReKind::lasso;
    const ReEstimate est = re_constant(d.X, q, small_budget());
    CHECK(est.value <= 1e-9);
    // witness is e_0 - e_1 up to sign and scale
    REQUIRE(est.witness.size() == 4);
    const double s01 = est.witness[0] + est.witness[1];
    CHECK(std::fabs(s01) <= 1e-6);
    CHECK(std::fabs(est.witness[0]) > 0.1);
    CHECK(norm2(est.witness) == doctest::Approx(1.0));
}

TEST_CASE("zero design returns 0 with a witness") {
    const Matrix X(6, 3, 0.0);
    ReQuery q;
    q.s = 1;
    q.a0 = 3.0;
    q.kind = ReKind::lasso;
    const ReEstimate est = re_constant(X, q, small_budget());
    CHECK(est.value == doctest::Approx(0.0));
    CHECK_FALSE(est.witness.empty());
}

TEST_CASE("estimate is stable against a 10x search budget") {
    const Dataset d = random_dataset(20, 6, 2718);
    ReQuery q;
    q.s = 2;
    q.a0 = 3.0;
    q.kind = ReKind::lasso;
    ReBudget lo = small_budget(1);
    ReBudget hi = small_budget(2);
    hi.directions = lo.directions * 10;
    hi.descent_steps = lo.descent_steps * 10;
    const double v_lo = re_constant(d.X, q, lo).value;
    const double v_hi = re_constant(d.X, q, hi).value;
    CHECK(v_hi <= v_lo * (1.0 + 1e-12)); // more search can only go lower
    CHECK(std::fabs(v_lo - v_hi) <= 0.05 * v_hi);
}

TEST_CASE("monotone in s and a0 along warm-started nested queries") {
    const Dataset d = random_dataset(18, 7, 99);
    ReQuery q;
    q.kind = ReKind::lasso;
    double prev = std::numeric_limits<double>::infinity();
    std::vector<Vector> warm;
    for (double a0 : {1.0, 2.0, 3.0}) {
        q.s = 2;
        q.a0 = a0;
        const ReEstimate est =
            re_constant(d.X, q, small_budget(7), warm);
        CHECK(est.value <= prev + 1e-12);
        prev = est.value;
        warm.push_back(est.witness);
    }
    prev = std::numeric_limits<double>::infinity();
    warm.clear();
    for (int s : {1, 2, 3}) {
        q.s = s;
        q.a0 = 3.0;
        const ReEstimate est = re_constant(d.X, q, small_budget(8), warm);
        CHECK(est.value <= prev + 1e-12);
        prev = est.value;
        warm.push_back(est.witness);
    }
}

TEST_CASE("scaling the design scales mu and mu1 linearly, mu2 quadratically") {
    Vector truth{1.0, 0.0, 0.0, -1.0};
    const Dataset d = random_dataset(15, 4, 123, &truth);
    Matrix X3 = d.X;
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 4; ++j) X3(i, j) *= 3.0;

    const GroupStructure groups = GroupStructure::contiguous({2, 2});
    Vector variances(15, 0.2);

    ReQuery lasso_q{1, 3.0, ReKind::lasso, std::nullopt, std::nullopt};
    ReQuery group_q{1, 3.0, ReKind::group, groups, std::nullopt};
    ReQuery wq{1, 3.0, ReKind::weighted_group, groups, variances};

    const ReBudget b = small_budget(5);
    CHECK(re_constant(X3, lasso_q, b).value ==
          doctest::Approx(3.0 * re_constant(d.X, lasso_q, b).value).epsilon(1e-9));
    CHECK(re_constant(X3, group_q, b).value ==
          doctest::Approx(3.0 * re_constant(d.X, group_q, b).value).epsilon(1e-9));
    CHECK(re_constant(X3, wq, b).value ==
          doctest::Approx(9.0 * re_constant(d.X, wq, b).value).epsilon(1e-9));
}

TEST_CASE("constant variances tie the weighted ratio to the group ratio") {
    const Dataset d = random_dataset(12, 4, 55);
    const GroupStructure groups = GroupStructure::contiguous({2, 2});
    const double vbar = 0.21;
    ReQuery gq{1, 3.0, ReKind::group, groups, std::nullopt};
    ReQuery wq{1, 3.0, ReKind::weighted_group, groups, Vector(12, vbar)};
    const ReBudget b = small_budget(6);
    const double g = re_constant(d.X, gq, b).value;
    const double w = re_constant(d.X, wq, b).value;
    CHECK(w == doctest::Approx(vbar * g * g).epsilon(1e-9));
}

TEST_CASE("every witness satisfies the cone constraint") {
    const Dataset d = random_dataset(14, 6, 77);
    const GroupStructure groups = GroupStructure::contiguous({2, 2, 2});
    for (auto kind : {ReKind::lasso, ReKind::group}) {
        ReQuery q;
        q.s = 2;
        q.a0 = 2.5;
        q.kind = kind;
        if (kind != ReKind::lasso) q.groups = groups;
        const ReEstimate est = re_constant(d.X, q, small_budget(3));
        CHECK(cone_membership(est.witness, est.witness_index_set, q.a0 * (1.0 + 1e-10),
                              kind, kind == ReKind::lasso ? nullptr : &groups));
        CHECK(est.budget_used > 0);
    }
}

TEST_CASE("infeasible enumeration demands the sampling override") {
    const Dataset d = random_dataset(10, 24, 13);
    ReQuery q;
    q.s = 12;
    q.a0 = 3.0;
    q.kind = ReKind::lasso;
    ReBudget b = small_budget(4);
    b.max_subsets = 1000;
    CHECK_THROWS_AS((void)re_constant(d.X, q, b), std::invalid_argument);
    b.allow_subset_sampling = true;
    b.sampled_subsets = 64;
    const ReEstimate est = re_constant(d.X, q, b);
    CHECK(est.value >= 0.0);
    CHECK_FALSE(est.witness.empty());
}

TEST_CASE("query validation") {
    const Dataset d = random_dataset(8, 4, 1);
    ReQuery q;
    q.s = 0;
    CHECK_THROWS_AS((void)re_constant(d.X, q, small_budget()), std::invalid_argument);
    q.s = 1;
    q.kind = ReKind::group;
    CHECK_THROWS_AS((void)re_constant(d.X, q, small_budget()), std::invalid_argument);
    q.kind = ReKind::weighted_group;
    q.groups = GroupStructure::contiguous({2, 2});
    CHECK_THROWS_AS((void)re_constant(d.X, q, small_budget()), std::invalid_argument);
    q.variances = Vector(8, 0.3); // above 1/4
    CHECK_THROWS_AS((void)re_constant(d.X, q, small_budget()), std::invalid_argument);
}
