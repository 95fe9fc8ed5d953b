#include <catch2/catch_amalgamated.hpp>

#include <sdnbi/problems.hpp>
#include <sdnbi/scalarize.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace sdnbi;

namespace {

// bounds computed from the anchor images of each problem
const ObjectiveBounds kMop1Bounds{{1.0 / 19.0, 4.0}, {1.0, 40.0}};
const ObjectiveBounds kZdt5Bounds{{1.0, 10.0 / 31.0}, {31.0, 10.0}};

ObjectivePoint pt(double z1, double z2) {
    ObjectivePoint p;
    p.z = {z1, z2};
    return p;
}

MnbiParams chim() { return facet_params(pt(0.0, 1.0), pt(1.0, 0.0), {0.5, 0.5}); }

SolverConfig cfg(int n_starts = 20, std::uint64_t seed = 7) {
    SolverConfig c;
    c.n_starts = n_starts;
    c.seed = seed;
    return c;
}

ParetoArchive anchors_archive() {
    ParetoArchive a(1e-6);
    a.insert(pt(0.0, 1.0));
    a.insert(pt(1.0, 0.0));
    return a;
}

} // namespace

TEST_CASE("facet frame places the origin at the corner point", "[scalarize]") {
    const MnbiParams p = facet_params(pt(0.2, 0.9), pt(0.6, 0.3), {0.5, 0.5});
    CHECK(p.origin[0] == Catch::Approx(0.2));
    CHECK(p.origin[1] == Catch::Approx(0.3));
    CHECK(p.phi[0][0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(p.phi[0][1] == Catch::Approx(0.6));
    CHECK(p.phi[1][0] == Catch::Approx(0.4));
    CHECK(p.phi[1][1] == Catch::Approx(0.0).margin(1e-15));
    // unit perpendicular with both components negative
    CHECK(p.nbar[0] == Catch::Approx(-0.6 / 0.7211102550927978).margin(1e-12));
    CHECK(p.nbar[1] == Catch::Approx(-0.4 / 0.7211102550927978).margin(1e-12));
    CHECK(norm2(p.nbar) == Catch::Approx(1.0).margin(1e-12));

    const Vec2 ref = reference_point(p);
    CHECK(ref[0] == Catch::Approx(0.4));
    CHECK(ref[1] == Catch::Approx(0.6));

    const MnbiParams c = chim();
    CHECK(c.origin[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(c.origin[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(c.nbar[0] == Catch::Approx(-std::sqrt(0.5)).margin(1e-12));
    CHECK(c.nbar[1] == Catch::Approx(-std::sqrt(0.5)).margin(1e-12));
}

TEST_CASE("t_of_x is the min ratio along the facet normal", "[scalarize]") {
    const MnbiParams p = chim();
    // hand arithmetic: (0.3-0.5)/(-1/sqrt2) = 0.2828, (0.2-0.5)/(-1/sqrt2) = 0.4243
    CHECK(t_of_x(p, {0.3, 0.2}) == Catch::Approx(0.2 * std::sqrt(2.0)).margin(1e-12));
    CHECK(t_of_x(p, {0.5, 0.5}) == Catch::Approx(0.0).margin(1e-12));
    CHECK(t_of_x(p, add({0.5, 0.5}, p.nbar)) == Catch::Approx(1.0).margin(1e-12));

    MnbiParams bad = chim();
    bad.nbar = {0.0, -1.0};
    CHECK_THROWS_WITH(t_of_x(bad, {0.2, 0.2}), "degenerate normal");
}

TEST_CASE("the reduced t satisfies the vector constraint with one equality", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const MnbiParams p = chim();
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        DecisionVector x;
        x.continuous = {u(rng), u(rng)};
        const Vec2 z = normalize(evaluate(mop1, x).f, kMop1Bounds);
        const double t = t_of_x(p, z);
        const Vec2 ref = reference_point(p);
        double worst = -1e300;
        for (int j = 0; j < 2; ++j) {
            const double r = z[j] - ref[j] - t * p.nbar[j];
            REQUIRE(r <= 1e-10);
            worst = std::max(worst, r);
        }
        REQUIRE(worst >= -1e-10);
    }
}

TEST_CASE("mnbi from the initial facet of mop1 hits the balanced front point", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const ParetoArchive arch = anchors_archive();
    const MnbiOutcome out = solve_mnbi(mop1, kMop1Bounds, chim(), cfg(), arch);
    REQUIRE(out.status == MnbiStatus::NewPoint);

    // normalized front z2 = (1-z1)/(2(18 z1+1)) meets the diagonal at
    // 36 c^2 + 3 c - 1 = 0, c = (-3+sqrt(153))/72
    const double c = (-3.0 + std::sqrt(153.0)) / 72.0;
    CHECK(out.point.z[0] == Catch::Approx(c).margin(5e-4));
    CHECK(out.point.z[1] == Catch::Approx(c).margin(5e-4));
    CHECK(out.t == Catch::Approx((0.5 - c) * std::sqrt(2.0)).margin(1e-3));
    CHECK(out.t == Catch::Approx(t_of_x(chim(), out.point.z)).margin(1e-12));

    // decision carries only problem variables, raw round-trips the bounds
    REQUIRE(out.point.decision.continuous.size() == 2);
    const Vec2 back = normalize(out.point.raw, kMop1Bounds);
    CHECK(back[0] == Catch::Approx(out.point.z[0]).margin(1e-12));
    CHECK(back[1] == Catch::Approx(out.point.z[1]).margin(1e-12));

    // deterministic under a fixed seed
    const MnbiOutcome rerun = solve_mnbi(mop1, kMop1Bounds, chim(), cfg(), arch);
    CHECK(rerun.point.z[0] == out.point.z[0]);
    CHECK(rerun.point.z[1] == out.point.z[1]);

    // multiplier based tangent at the balanced point
    const SupportData sd = supporting_normal(out.solver, out.point.z);
    CHECK(sd.w[0] >= 0.0);
    CHECK(sd.w[1] >= 0.0);
    CHECK(sd.w[0] + sd.w[1] == Catch::Approx(1.0).margin(1e-9));
    // slope of the front branch at c gives w1/w2 = 38/(2(18c+1))^2
    const double slope = 38.0 / std::pow(2.0 * (18.0 * c + 1.0), 2);
    CHECK(sd.w[0] / sd.w[1] == Catch::Approx(slope).margin(2e-3));
    CHECK(sd.b == Catch::Approx(dot(sd.w, out.point.z)).margin(1e-12));
}

TEST_CASE("mnbi reports a repeat when the solution is already archived", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    ParetoArchive arch = anchors_archive();
    const MnbiOutcome first = solve_mnbi(mop1, kMop1Bounds, chim(), cfg(), arch);
    REQUIRE(first.status == MnbiStatus::NewPoint);
    arch.insert(first.point);
    const MnbiOutcome second = solve_mnbi(mop1, kMop1Bounds, chim(), cfg(), arch);
    CHECK(second.status == MnbiStatus::RepeatPoint);
}

TEST_CASE("fathom side a pins the first objective at the bound", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const ParetoArchive arch = anchors_archive();
    MnbiParams p = chim();
    p.extra_bound = ExtraBound{ExtraBound::Side::A, 0.5};
    const MnbiOutcome out = solve_mnbi_fathom(mop1, kMop1Bounds, p, cfg(), arch);
    REQUIRE(out.status == MnbiStatus::NewPoint);
    // on the plateau the tie break must pick the nondominated representative
    CHECK(out.point.z[0] == Catch::Approx(0.5).margin(1e-3));
    CHECK(out.point.z[1] == Catch::Approx(0.025).margin(3e-3));
    CHECK(out.t == Catch::Approx(0.0).margin(2e-3));
}

TEST_CASE("extra bound preconditions are enforced", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const ParetoArchive arch = anchors_archive();
    MnbiParams with_bound = chim();
    with_bound.extra_bound = ExtraBound{ExtraBound::Side::A, 0.1};
    CHECK_THROWS_AS(solve_mnbi(mop1, kMop1Bounds, with_bound, cfg(), arch),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_mnbi_fathom(mop1, kMop1Bounds, chim(), cfg(), arch),
                    std::invalid_argument);
}

TEST_CASE("integer mnbi lands on the exact combinatorial front point", "[scalarize]") {
    const ProblemSpec zdt5 = make_problem("zdt5");
    const ParetoArchive arch = anchors_archive();
    const MnbiOutcome out = solve_mnbi(zdt5, kZdt5Bounds, chim(), cfg(30, 3), arch);
    REQUIRE(out.status == MnbiStatus::NewPoint);
    // front points are (k/30, (30-k)/(30(1+k))); t is maximized at k = 5
    CHECK(out.point.z[0] == Catch::Approx(5.0 / 30.0).margin(1e-9));
    CHECK(out.point.z[1] == Catch::Approx(25.0 / 180.0).margin(1e-9));
    CHECK(out.t == Catch::Approx(std::sqrt(2.0) / 3.0).margin(1e-9));
    CHECK(out.point.raw[0] == Catch::Approx(6.0).margin(1e-12));
    CHECK(out.point.raw[1] == Catch::Approx(10.0 / 6.0).margin(1e-12));
    REQUIRE(out.point.decision.integer.size() == 11);
    for (std::size_t i = 1; i < 11; ++i) CHECK(out.point.decision.integer[i] == 5);
    CHECK(out.point.decision.integer[0] == 5);
}

TEST_CASE("supporting normal normalizes the objective multipliers", "[scalarize]") {
    SolveResult res;
    res.active_set = {0, 1};
    res.multipliers = {2.0, 2.0};
    const SupportData even = supporting_normal(res, {0.3, 0.4});
    CHECK(even.w[0] == Catch::Approx(0.5));
    CHECK(even.w[1] == Catch::Approx(0.5));
    CHECK(even.b == Catch::Approx(0.35));

    res.multipliers = {1.0, 3.0};
    const SupportData skew = supporting_normal(res, {0.3, 0.4});
    CHECK(skew.w[0] == Catch::Approx(0.25));
    CHECK(skew.w[1] == Catch::Approx(0.75));

    SolveResult one;
    one.active_set = {1, 3};
    one.multipliers = {3.0, 9.0};
    const SupportData axis = supporting_normal(one, {0.2, 0.2});
    CHECK(axis.w[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(axis.w[1] == Catch::Approx(1.0));

    SolveResult zero;
    zero.active_set = {0, 1};
    zero.multipliers = {0.0, 0.0};
    CHECK_THROWS_WITH(supporting_normal(zero, {0.1, 0.1}), "vanishing multipliers");
}

TEST_CASE("fallback normal reads activity off the facet frame", "[scalarize]") {
    const MnbiParams p = chim();
    // both wedge constraints tight on the diagonal
    const SupportData both = fallback_normal(p, {0.2, 0.2});
    CHECK(both.w[0] == Catch::Approx(0.5));
    CHECK(both.w[1] == Catch::Approx(0.5));
    // only the first component is tight at (0.3, 0.2)
    const SupportData first = fallback_normal(p, {0.3, 0.2});
    CHECK(first.w[0] == Catch::Approx(1.0));
    CHECK(first.w[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(first.b == Catch::Approx(0.3));
}

TEST_CASE("weighted sum finds the slope matched supported point", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const ObjectivePoint p = solve_weighted_sum(mop1, kMop1Bounds, {0.5, 0.5}, cfg());
    // tangency where the front slope is -1: (2(18 z1+1))^2 = 38
    const double ez1 = (std::sqrt(38.0) / 2.0 - 1.0) / 18.0;
    const double ez2 = (1.0 - ez1) / (2.0 * (18.0 * ez1 + 1.0));
    CHECK(p.z[0] == Catch::Approx(ez1).margin(1e-3));
    CHECK(p.z[1] == Catch::Approx(ez2).margin(1e-3));
    REQUIRE(p.normal.has_value());
    CHECK((*p.normal)[0] == Catch::Approx(0.5));
    CHECK(p.offset.has_value());

    const ObjectivePoint a1 = solve_weighted_sum(mop1, kMop1Bounds, {1.0 - 1e-6, 1e-6}, cfg());
    CHECK(a1.z[0] == Catch::Approx(0.0).margin(1e-3));
    CHECK(a1.z[1] == Catch::Approx(1.0).margin(1e-3));

    CHECK_THROWS_AS(solve_weighted_sum(mop1, kMop1Bounds, {0.7, 0.2}, cfg()),
                    std::invalid_argument);
}

TEST_CASE("weighted sum surfaces solver infeasibility as an error", "[scalarize]") {
    ProblemSpec impossible = make_problem("mop1");
    impossible.constraints.push_back(
        [](const DecisionVector& d) { return d.continuous[0] + 10.0; });
    if (impossible.gradients) {
        impossible.gradients->g.push_back(
            [](const DecisionVector&) { return std::vector<double>{1.0, 0.0}; });
    }
    CHECK_THROWS_AS(solve_weighted_sum(impossible, kMop1Bounds, {0.5, 0.5}, cfg()),
                    std::runtime_error);
}

TEST_CASE("anchor solves bracket the raw objective ranges", "[scalarize]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const ObjectivePoint a1 = solve_anchor(mop1, 0, cfg());
    CHECK(a1.raw[0] == Catch::Approx(1.0 / 19.0).margin(1e-4));
    CHECK(a1.raw[1] == Catch::Approx(40.0).margin(1e-2));
    const ObjectivePoint a2 = solve_anchor(mop1, 1, cfg());
    CHECK(a2.raw[0] == Catch::Approx(1.0).margin(1e-4));
    CHECK(a2.raw[1] == Catch::Approx(4.0).margin(1e-6));

    const ProblemSpec zdt5 = make_problem("zdt5");
    const ObjectivePoint b1 = solve_anchor(zdt5, 0, cfg(30, 3));
    CHECK(b1.raw[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(b1.raw[1] == Catch::Approx(10.0).margin(1e-12));
    const ObjectivePoint b2 = solve_anchor(zdt5, 1, cfg(30, 3));
    CHECK(b2.raw[0] == Catch::Approx(31.0).margin(1e-12));
    CHECK(b2.raw[1] == Catch::Approx(10.0 / 31.0).margin(1e-12));
}
