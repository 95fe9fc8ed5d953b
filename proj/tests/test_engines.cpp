#include <catch2/catch_amalgamated.hpp>

#include <sdnbi/engines.hpp>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sdnbi;

namespace {

// single integer variable front: f1 = y, f2 = table[y]
ProblemSpec table_problem(std::vector<double> table) {
    ProblemSpec s;
    s.name = "table";
    s.n2 = 1;
    s.int_lower = {0};
    s.int_upper = {static_cast<int>(table.size()) - 1};
    s.f1 = [](const DecisionVector& d) { return static_cast<double>(d.integer[0]); };
    s.f2 = [table](const DecisionVector& d) {
        return table[static_cast<std::size_t>(d.integer[0])];
    };
    return s;
}

// front {(0,6),(1,3),(3,0)}, y=2 dominated; normalized (0,1),(1/3,1/2),(1,0)
ProblemSpec three_point_front() { return table_problem({6.0, 3.0, 5.0, 0.0}); }

// front {(0,6),(1,5),(2,3),(3,0)}, all nondominated; the middle points lie
// above the anchor chord so the walk has to split off nonconvex pieces
ProblemSpec concave_front() { return table_problem({6.0, 5.0, 3.0, 0.0}); }

EngineConfig config(Algorithm a, double eps, int iters, int n_starts = 8, int n_beta = 10) {
    EngineConfig c;
    c.algorithm = a;
    c.epsilon = eps;
    c.max_iters = iters;
    c.n_beta = n_beta;
    c.solver.n_starts = n_starts;
    return c;
}

std::vector<std::string> events_of(const EngineResult& r) {
    std::vector<std::string> out;
    for (const IterationRecord& rec : r.iterations) out.push_back(rec.event);
    return out;
}

bool known_event(const std::string& e) {
    if (e == "new-point" || e == "repeat" || e == "fathom-facet" ||
        e == "terminated-empty" || e == "terminated-tol") {
        return true;
    }
    return e.size() > 11 && e.rfind("decompose(", 0) == 0 && e.back() == ')';
}

// structural invariants every engine result has to satisfy
void check_ledger(const EngineResult& r) {
    REQUIRE(!r.iterations.empty());
    REQUIRE((r.termination == "tolerance" || r.termination == "exhausted" ||
             r.termination == "max-iters"));
    for (std::size_t i = 0; i < r.iterations.size(); ++i) {
        const IterationRecord& rec = r.iterations[i];
        CHECK(rec.iter == static_cast<int>(i) + 1);
        CHECK(known_event(rec.event));
        CHECK(rec.d_max >= 0.0);
        CHECK(rec.elapsed >= 0.0);
        CHECK(rec.archive_size >= 1);
        if (rec.event == "new-point" || rec.event.rfind("decompose(", 0) == 0) {
            CHECK(rec.new_point.has_value());
        }
        if (rec.new_point) {
            CHECK((rec.event == "new-point" || rec.event.rfind("decompose(", 0) == 0 ||
                   rec.event == "fathom-facet"));
        }
        if (rec.event == "repeat" || rec.event == "terminated-empty" ||
            rec.event == "terminated-tol") {
            CHECK(!rec.new_point.has_value());
        }
    }
    const IterationRecord& last = r.iterations.back();
    if (r.termination == "exhausted") CHECK(last.event == "terminated-empty");
    if (r.termination == "tolerance") CHECK(last.event == "terminated-tol");
    if (r.termination == "max-iters") {
        CHECK(last.event != "terminated-empty");
        CHECK(last.event != "terminated-tol");
    }
    CHECK(last.archive_size == r.archive.size());

    const auto& pts = r.archive.points();
    REQUIRE(pts.size() >= 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const ObjectivePoint& p = pts[i];
        CHECK(p.iter_found >= 1);
        CHECK(p.iter_found <= last.iter);
        REQUIRE(p.normal.has_value());
        REQUIRE(p.offset.has_value());
        const Vec2 zn = normalize(p.raw, r.bounds);
        CHECK(p.z[0] == Catch::Approx(zn[0]).margin(1e-12));
        CHECK(p.z[1] == Catch::Approx(zn[1]).margin(1e-12));
        if (i > 0) {
            CHECK(pts[i - 1].z[0] < p.z[0]);
            CHECK(pts[i - 1].z[1] > p.z[1]);
        }
    }
    for (const FathomedInterval& iv : r.fathomed) {
        CHECK(iv.lo < iv.hi);
        CHECK(iv.iter >= 3);
        CHECK(iv.iter <= last.iter);
    }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("engine configuration is validated", "[engines]") {
    CHECK(algorithm_from_name("sd") == Algorithm::Sd);
    CHECK(algorithm_from_name("mnbi") == Algorithm::Mnbi);
    CHECK(algorithm_from_name("sdnbi") == Algorithm::Sdnbi);
    CHECK_THROWS_AS(algorithm_from_name("nbi"), std::invalid_argument);
    CHECK(algorithm_name(Algorithm::Sd) == "sd");
    CHECK(algorithm_name(Algorithm::Mnbi) == "mnbi");
    CHECK(algorithm_name(Algorithm::Sdnbi) == "sdnbi");

    const ProblemSpec p = three_point_front();
    CHECK_THROWS_AS(run_sd(p, config(Algorithm::Sdnbi, 1e-3, 10)), std::invalid_argument);
    CHECK_THROWS_AS(run_sdnbi(p, config(Algorithm::Sd, 1e-3, 10)), std::invalid_argument);
    CHECK_THROWS_AS(run_sdnbi(p, config(Algorithm::Sdnbi, 0.0, 10)), std::invalid_argument);
    CHECK_THROWS_AS(run_sdnbi(p, config(Algorithm::Sdnbi, 1e-3, 0)), std::invalid_argument);
    CHECK_THROWS_AS(run_mnbi(p, config(Algorithm::Mnbi, 1e-3, 10, 8, 1)),
                    std::invalid_argument);

    const EngineResult via_dispatch = run_engine(p, config(Algorithm::Sd, 1e-3, 20));
    const EngineResult direct = run_sd(p, config(Algorithm::Sd, 1e-3, 20));
    CHECK(via_dispatch.termination == direct.termination);
    CHECK(via_dispatch.iterations.size() == direct.iterations.size());
}

TEST_CASE("hybrid walk resolves a three point integer front", "[engines]") {
    int observer_calls = 0;
    int first_observed_iter = 0;
    SdnbiObserver obs = [&](int iter, const std::vector<Subspace>& subs,
                            const std::vector<Approximation>& apps) {
        if (observer_calls == 0) first_observed_iter = iter;
        ++observer_calls;
        CHECK(!subs.empty());
        CHECK(apps.size() == subs.size());
    };
    const EngineResult r = run_sdnbi(three_point_front(),
                                     config(Algorithm::Sdnbi, 1e-3, 20), obs);
    check_ledger(r);

    // anchors, midpoint split, two endpoint facets fathomed away, exhaustion
    const std::vector<std::string> want = {"new-point",    "new-point",
                                           "decompose(2)", "fathom-facet",
                                           "fathom-facet", "terminated-empty"};
    CHECK(events_of(r) == want);
    REQUIRE(r.iterations.size() == 6);
    CHECK(r.termination == "exhausted");
    CHECK(r.iterations[0].d_max == kInf);
    CHECK(r.iterations[1].d_max == kInf);
    CHECK(r.iterations[2].d_max == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.iterations[3].d_max == Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK(r.iterations[4].d_max == Catch::Approx(1.0 / 3.0).margin(1e-9));
    CHECK(r.iterations[5].d_max == 0.0);
    const std::vector<std::size_t> sizes = {1, 2, 3, 3, 3, 3};
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        CHECK(r.iterations[i].archive_size == sizes[i]);
    }
    REQUIRE(r.iterations[2].new_point.has_value());
    CHECK(r.iterations[2].new_point->raw[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.iterations[2].new_point->raw[1] == Catch::Approx(3.0).margin(1e-12));

    REQUIRE(r.archive.size() == 3);
    const auto& pts = r.archive.points();
    CHECK(pts[0].raw[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(pts[0].raw[1] == Catch::Approx(6.0).margin(1e-12));
    CHECK(pts[1].raw[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(pts[1].raw[1] == Catch::Approx(3.0).margin(1e-12));
    CHECK(pts[2].raw[0] == Catch::Approx(3.0).margin(1e-12));
    CHECK(pts[2].raw[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(pts[0].iter_found == 1);
    CHECK(pts[1].iter_found == 3);
    CHECK(pts[2].iter_found == 2);

    // the right facet fathoms first (larger unresolved width), then the left
    REQUIRE(r.fathomed.size() == 2);
    CHECK(r.fathomed[0].iter == 4);
    CHECK(r.fathomed[0].lo == Catch::Approx(1.0 / 3.0 + 1e-4).margin(1e-12));
    CHECK(r.fathomed[0].hi == Catch::Approx(1.0 - 1e-5).margin(1e-12));
    CHECK(r.fathomed[1].iter == 5);
    CHECK(r.fathomed[1].lo == Catch::Approx(1e-5).margin(1e-12));
    CHECK(r.fathomed[1].hi == Catch::Approx(1.0 / 3.0 - 1e-4).margin(1e-12));

    // one observer call after the anchors, one at the end of each pass
    CHECK(first_observed_iter == 2);
    CHECK(observer_calls == 5);
}

TEST_CASE("hybrid walk splits a concave integer front by convexity", "[engines]") {
    const EngineResult r = run_sdnbi(concave_front(), config(Algorithm::Sdnbi, 1e-3, 20));
    check_ledger(r);

    const std::vector<std::string> want = {"new-point",    "new-point",
                                           "decompose(2)", "decompose(2)",
                                           "fathom-facet", "fathom-facet",
                                           "fathom-facet", "terminated-empty"};
    CHECK(events_of(r) == want);
    REQUIRE(r.iterations.size() == 8);
    CHECK(r.termination == "exhausted");
    CHECK(r.iterations[2].d_max == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.iterations[3].d_max == Catch::Approx(2.0 / 3.0).margin(1e-9));
    for (std::size_t i = 4; i <= 6; ++i) {
        CHECK(r.iterations[i].d_max == Catch::Approx(1.0 / 3.0).margin(1e-9));
    }
    CHECK(r.iterations[7].d_max == 0.0);

    REQUIRE(r.archive.size() == 4);
    const auto& pts = r.archive.points();
    for (int k = 0; k < 4; ++k) {
        CHECK(pts[static_cast<std::size_t>(k)].raw[0] == Catch::Approx(k).margin(1e-12));
    }
    CHECK(pts[0].raw[1] == Catch::Approx(6.0).margin(1e-12));
    CHECK(pts[1].raw[1] == Catch::Approx(5.0).margin(1e-12));
    CHECK(pts[2].raw[1] == Catch::Approx(3.0).margin(1e-12));
    CHECK(pts[3].raw[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(pts[0].iter_found == 1);
    CHECK(pts[1].iter_found == 4);
    CHECK(pts[2].iter_found == 3);
    CHECK(pts[3].iter_found == 2);

    // equal widths break ties left to right once both splits are done
    REQUIRE(r.fathomed.size() == 3);
    CHECK(r.fathomed[0].iter == 5);
    CHECK(r.fathomed[0].lo == Catch::Approx(1e-4).margin(1e-12));
    CHECK(r.fathomed[0].hi == Catch::Approx(1.0 / 3.0 - 1e-5).margin(1e-12));
    // the middle facet can repeat at either endpoint first, which flips the
    // probe side and with it the exact padding applied to each end
    CHECK(r.fathomed[1].iter == 6);
    CHECK(r.fathomed[1].lo >= 1.0 / 3.0 + 5e-6);
    CHECK(r.fathomed[1].lo <= 1.0 / 3.0 + 1.5e-4);
    CHECK(r.fathomed[1].hi >= 2.0 / 3.0 - 1.5e-4);
    CHECK(r.fathomed[1].hi <= 2.0 / 3.0 - 5e-6);
    CHECK(r.fathomed[2].iter == 7);
    CHECK(r.fathomed[2].lo == Catch::Approx(2.0 / 3.0 + 1e-5).margin(1e-12));
    CHECK(r.fathomed[2].hi == Catch::Approx(1.0 - 1e-4).margin(1e-12));
}

TEST_CASE("tolerance stop reports the residual error", "[engines]") {
    const EngineResult r = run_sdnbi(three_point_front(), config(Algorithm::Sdnbi, 0.8, 20));
    check_ledger(r);
    REQUIRE(r.iterations.size() == 4);
    CHECK(r.termination == "tolerance");
    CHECK(r.iterations[3].event == "terminated-tol");
    CHECK(r.iterations[3].d_max == Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK(r.archive.size() == 3);
    CHECK(r.fathomed.empty());
}

TEST_CASE("sandwich walk closes facets on repeats", "[engines]") {
    const EngineResult r = run_sd(three_point_front(), config(Algorithm::Sd, 1e-3, 20));
    check_ledger(r);

    const std::vector<std::string> want = {"new-point", "new-point", "new-point",
                                           "repeat",    "repeat",    "terminated-empty"};
    CHECK(events_of(r) == want);
    REQUIRE(r.iterations.size() == 6);
    CHECK(r.termination == "exhausted");
    CHECK(r.iterations[0].d_max == kInf);
    CHECK(r.iterations[1].d_max == kInf);
    // hull gap of the anchor chord, then of the two refined facets
    CHECK(r.iterations[2].d_max == Catch::Approx(0.5).margin(1e-9));
    CHECK(r.iterations[3].d_max == Catch::Approx(1.0 / 14.0).margin(1e-9));
    CHECK(r.iterations[4].d_max == Catch::Approx(1.0 / 15.0).margin(1e-9));
    CHECK(r.iterations[5].d_max == 0.0);

    REQUIRE(r.archive.size() == 3);
    CHECK(r.archive.points()[1].raw[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.archive.points()[1].raw[1] == Catch::Approx(3.0).margin(1e-12));
    CHECK(r.fathomed.empty());
}

TEST_CASE("boundary intersection walk refines the widest gap", "[engines]") {
    const EngineResult r = run_mnbi(three_point_front(),
                                    config(Algorithm::Mnbi, 1e-3, 6, 8, 3));
    check_ledger(r);

    // grid gives the midpoint, refinement lands on already archived points
    const std::vector<std::string> want = {"new-point", "new-point", "new-point",
                                           "repeat",    "repeat",    "repeat"};
    CHECK(events_of(r) == want);
    REQUIRE(r.iterations.size() == 6);
    CHECK(r.termination == "max-iters");
    for (const IterationRecord& rec : r.iterations) CHECK(rec.d_max == 0.0);
    REQUIRE(r.iterations[2].new_point.has_value());
    CHECK(r.iterations[2].new_point->raw[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.archive.size() == 3);
    CHECK(r.fathomed.empty());
}

TEST_CASE("identical runs produce identical results", "[engines]") {
    const auto same = [](const EngineResult& a, const EngineResult& b) {
        REQUIRE(a.termination == b.termination);
        REQUIRE(a.iterations.size() == b.iterations.size());
        for (std::size_t i = 0; i < a.iterations.size(); ++i) {
            CHECK(a.iterations[i].event == b.iterations[i].event);
            CHECK(a.iterations[i].d_max == b.iterations[i].d_max);
            CHECK(a.iterations[i].archive_size == b.iterations[i].archive_size);
        }
        REQUIRE(a.archive.size() == b.archive.size());
        for (std::size_t i = 0; i < a.archive.size(); ++i) {
            CHECK(a.archive.points()[i].z[0] == b.archive.points()[i].z[0]);
            CHECK(a.archive.points()[i].z[1] == b.archive.points()[i].z[1]);
        }
        REQUIRE(a.fathomed.size() == b.fathomed.size());
        for (std::size_t i = 0; i < a.fathomed.size(); ++i) {
            CHECK(a.fathomed[i].lo == b.fathomed[i].lo);
            CHECK(a.fathomed[i].hi == b.fathomed[i].hi);
        }
    };

    const ProblemSpec tbl = concave_front();
    same(run_sdnbi(tbl, config(Algorithm::Sdnbi, 1e-3, 20)),
         run_sdnbi(tbl, config(Algorithm::Sdnbi, 1e-3, 20)));

    const ProblemSpec sch2 = make_problem("sch2");
    const ProblemDefaults d = problem_defaults("sch2");
    EngineConfig c = config(Algorithm::Sdnbi, d.eps, d.max_iters, d.n_starts);
    same(run_sdnbi(sch2, c), run_sdnbi(sch2, c));
}

TEST_CASE("convex benchmark is fully resolved by all engines", "[engines]") {
    const ProblemSpec mop1 = make_problem("mop1");
    const ProblemDefaults d = problem_defaults("mop1");

    // a tolerance far below the achievable gaps keeps every engine running
    // to the iteration budget
    const EngineResult sd = run_sd(mop1, config(Algorithm::Sd, 1e-12, d.max_iters, d.n_starts));
    check_ledger(sd);
    CHECK(sd.archive.size() == 33);
    CHECK(sd.termination == "max-iters");
    for (std::size_t i = 3; i < sd.iterations.size(); ++i) {
        CHECK(sd.iterations[i].d_max <= sd.iterations[i - 1].d_max + 1e-12);
    }

    const EngineResult nbi = run_mnbi(mop1, config(Algorithm::Mnbi, 1e-12, d.max_iters,
                                                   d.n_starts, d.n_beta));
    check_ledger(nbi);
    CHECK(nbi.archive.size() == 33);
    for (std::size_t i = 2; i < nbi.iterations.size(); ++i) {
        CHECK(nbi.iterations[i].event == "new-point");
    }

    const EngineResult hyb = run_sdnbi(mop1, config(Algorithm::Sdnbi, 1e-12, d.max_iters,
                                                    d.n_starts));
    check_ledger(hyb);
    CHECK(hyb.archive.size() == 33);
    for (std::size_t i = 2; i < hyb.iterations.size(); ++i) {
        CHECK(hyb.iterations[i].new_point.has_value());
    }
}

TEST_CASE("quartic front gap is certified empty", "[engines]") {
    const ProblemSpec sch2 = make_problem("sch2");
    const ProblemDefaults d = problem_defaults("sch2");
    const EngineResult r = run_sdnbi(sch2, config(Algorithm::Sdnbi, d.eps, d.max_iters,
                                                  d.n_starts));
    check_ledger(r);

    CHECK(r.archive.size() >= 24);
    CHECK(r.archive.size() <= 27);
    bool fathomed_any = false;
    for (const IterationRecord& rec : r.iterations) {
        if (rec.event == "fathom-facet") fathomed_any = true;
    }
    CHECK(fathomed_any);

    // the front is disconnected below the left stretch; a certificate must
    // span the bulk of the empty band and exclude every archived point
    bool covers_gap = false;
    for (const FathomedInterval& iv : r.fathomed) {
        if (iv.lo <= 0.01 && iv.hi >= 0.05) covers_gap = true;
        for (const ObjectivePoint& p : r.archive.points()) {
            CHECK(!(iv.lo < p.z[0] && p.z[0] < iv.hi));
        }
    }
    CHECK(covers_gap);
}

TEST_CASE("ring shaped front is explored within budget", "[engines]") {
    const ProblemSpec tnk = make_problem("tnk");
    const ProblemDefaults d = problem_defaults("tnk");

    // the chord midpoint weighted sum cannot beat the anchors, so the
    // sandwich walk stops with the two endpoints only
    const EngineResult sd = run_sd(tnk, config(Algorithm::Sd, d.eps, d.max_iters, d.n_starts));
    check_ledger(sd);
    const std::vector<std::string> want = {"new-point", "new-point", "repeat",
                                           "terminated-empty"};
    CHECK(events_of(sd) == want);
    CHECK(sd.archive.size() == 2);
    CHECK(sd.termination == "exhausted");
    CHECK(sd.iterations[2].d_max == Catch::Approx(0.5).margin(1e-6));

    const EngineResult hyb = run_sdnbi(tnk, config(Algorithm::Sdnbi, d.eps, d.max_iters,
                                                   d.n_starts));
    check_ledger(hyb);
    CHECK(hyb.archive.size() >= 40);
    CHECK(hyb.archive.size() <= 59);
    for (const FathomedInterval& iv : hyb.fathomed) {
        for (const ObjectivePoint& p : hyb.archive.points()) {
            CHECK(!(iv.lo < p.z[0] && p.z[0] < iv.hi));
        }
    }

    const EngineResult nbi = run_mnbi(tnk, config(Algorithm::Mnbi, d.eps, d.max_iters,
                                                  d.n_starts, d.n_beta));
    check_ledger(nbi);
    CHECK(nbi.archive.size() >= 40);
}

TEST_CASE("combinatorial staircase is enumerated then certified", "[engines]") {
    const ProblemSpec zdt5 = make_problem("zdt5");
    const ProblemDefaults d = problem_defaults("zdt5");

    SECTION("iteration budget cuts off the certification phase") {
        const EngineResult r = run_sdnbi(zdt5, config(Algorithm::Sdnbi, d.eps, d.max_iters,
                                                      d.n_starts));
        check_ledger(r);
        CHECK(r.termination == "max-iters");
        REQUIRE(r.iterations.size() == 40);

        // all thirty one front points arrive before any facet fathoms
        REQUIRE(r.archive.size() == 31);
        const auto& pts = r.archive.points();
        for (int k = 0; k <= 30; ++k) {
            const ObjectivePoint& p = pts[static_cast<std::size_t>(k)];
            CHECK(p.raw[0] == Catch::Approx(1.0 + k).margin(1e-9));
            CHECK(p.raw[1] == Catch::Approx(10.0 / (1.0 + k)).margin(1e-9));
        }
        int last_new = 0;
        int first_fathom = 0;
        for (const IterationRecord& rec : r.iterations) {
            if (rec.new_point) last_new = rec.iter;
            if (rec.event == "fathom-facet" && first_fathom == 0) first_fathom = rec.iter;
        }
        CHECK(last_new == 31);
        CHECK(first_fathom == 32);
        for (const IterationRecord& rec : r.iterations) {
            if (rec.iter >= 32) CHECK(rec.event == "fathom-facet");
        }
        CHECK(r.fathomed.size() == 9);
    }

    SECTION("a tighter tolerance runs to facet exhaustion") {
        const EngineResult r = run_sdnbi(zdt5, config(Algorithm::Sdnbi, 1e-3, 80,
                                                      d.n_starts));
        check_ledger(r);
        CHECK(r.termination == "exhausted");
        REQUIRE(!r.iterations.empty());
        const IterationRecord& last = r.iterations.back();
        CHECK(last.event == "terminated-empty");
        CHECK(last.iter >= 55);
        CHECK(last.iter <= 70);
        CHECK(last.iter == 62);
        REQUIRE(r.archive.size() == 31);

        int last_new = 0;
        for (const IterationRecord& rec : r.iterations) {
            if (rec.new_point) last_new = rec.iter;
        }
        CHECK(last_new == 31);

        // every step pair (k/30, (k+1)/30) is certified empty exactly once,
        // padded inward around the solved endpoints
        REQUIRE(r.fathomed.size() == 30);
        std::vector<int> hits(30, 0);
        for (const FathomedInterval& iv : r.fathomed) {
            const int k = static_cast<int>(std::lround(iv.lo * 30.0));
            REQUIRE(k >= 0);
            REQUIRE(k < 30);
            ++hits[static_cast<std::size_t>(k)];
            CHECK(iv.lo >= k / 30.0 + 9e-6);
            CHECK(iv.lo <= k / 30.0 + 1.1e-4);
            CHECK(iv.hi >= (k + 1) / 30.0 - 1.1e-4);
            CHECK(iv.hi <= (k + 1) / 30.0 - 9e-6);
        }
        for (int k = 0; k < 30; ++k) CHECK(hits[static_cast<std::size_t>(k)] == 1);
        for (const FathomedInterval& iv : r.fathomed) {
            for (int j = 0; j <= 30; ++j) {
                const double z1 = j / 30.0;
                CHECK(!(iv.lo < z1 && z1 < iv.hi));
            }
        }
    }
}

TEST_CASE("disconnected continuous stretches keep certificates sound", "[engines]") {
    const ProblemSpec zdt3 = make_problem("zdt3");
    const ProblemDefaults d = problem_defaults("zdt3");
    const EngineResult r = run_sdnbi(zdt3, config(Algorithm::Sdnbi, d.eps, d.max_iters,
                                                  d.n_starts));
    check_ledger(r);
    CHECK(r.archive.size() >= 25);

    // closed form of the attainable lower boundary at the optimal tail
    std::vector<Vec2> curve;
    for (int i = 0; i <= 2000; ++i) {
        const double x1 = 0.8519 * i / 2000.0;
        const double f2 = 1.0 - std::sqrt(x1) - x1 * std::sin(10.0 * std::numbers::pi * x1);
        curve.push_back({x1, f2});
    }
    std::vector<Vec2> front;
    for (const Vec2& a : curve) {
        bool dominated = false;
        for (const Vec2& b : curve) {
            if (b[0] <= a[0] && b[1] <= a[1] && (b[0] < a[0] || b[1] < a[1])) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(a);
    }
    REQUIRE(front.size() > 100);
    for (const FathomedInterval& iv : r.fathomed) {
        for (const Vec2& f : front) {
            const double z1 = (f[0] - r.bounds.ideal[0]) /
                              (r.bounds.nadir[0] - r.bounds.ideal[0]);
            CHECK(!(iv.lo < z1 && z1 < iv.hi));
        }
    }
}
